import init, { render, augment, stretch } from "./pkg/sonoforge_web.js";

const RATE = 16000;
const $ = (id) => document.getElementById(id);

let samples = null;
let sampleRate = RATE;
let gallery = null;
let audio = null;

function status(msg) {
  $("status").textContent = msg || "";
}

function synth(kind) {
  const n = RATE;
  const x = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    const t = i / RATE;
    switch (kind) {
      case "tone":
        x[i] = 0.5 * Math.sin(2 * Math.PI * 440 * t);
        break;
      case "chirp":
        x[i] = 0.5 * Math.sin(2 * Math.PI * (1000 * t + 2500 * t * t));
        break;
      case "chord":
        x[i] = 0.3 * Math.sin(2 * Math.PI * 440 * t) + 0.3 * Math.sin(2 * Math.PI * 659.25 * t);
        break;
      default:
        x[i] = 0.005 * (Math.random() * 2 - 1);
    }
  }
  if (kind === "burst") {
    const len = RATE / 20;
    for (let b = 0; b < 5; b++) {
      const start = Math.floor(Math.random() * (n - len));
      for (let i = start; i < start + len; i++) x[i] += 0.4 * (Math.random() * 2 - 1);
    }
  }
  return x;
}

function draw(canvas, pic) {
  canvas.width = pic.width;
  canvas.height = pic.height;
  const data = new ImageData(new Uint8ClampedArray(pic.rgba()), pic.width, pic.height);
  canvas.getContext("2d").putImageData(data, 0, 0);
  pic.free();
}

function guarded(f) {
  return () => {
    status("");
    try {
      f();
    } catch (e) {
      status(String(e.message || e));
    }
  };
}

function play(x, rate) {
  audio ??= new AudioContext();
  const buf = audio.createBuffer(1, x.length, rate);
  buf.copyToChannel(x, 0);
  const src = audio.createBufferSource();
  src.buffer = buf;
  src.connect(audio.destination);
  src.start();
}

const showSpectrogram = guarded(() => {
  draw($("spec"), render(samples, sampleRate, $("repr").value));
});

function showCopy() {
  if (!gallery) return;
  const i = Number($("copy").value);
  draw($("aug"), gallery.get(i));
  $("copy-label").textContent = `${i + 1} / ${gallery.length}`;
}

const runAugment = guarded(() => {
  gallery?.free();
  gallery = null;
  status("working...");
  const seed = Math.max(0, Number($("seed").value) | 0);
  gallery = augment(samples, sampleRate, $("repr").value, $("protocol").value, seed);
  status("");
  $("copy").max = String(gallery.length - 1);
  $("copy").value = "0";
  $("copy").disabled = false;
  showCopy();
});

const runStretch = guarded(() => {
  const y = stretch(samples, sampleRate, $("algorithm").value, Number($("alpha").value));
  draw($("tsm"), render(y, sampleRate, $("repr").value));
  play(y, sampleRate);
});

function useSamples(x, rate) {
  samples = x;
  sampleRate = rate;
  gallery?.free();
  gallery = null;
  $("copy").disabled = true;
  $("copy-label").textContent = "";
  showSpectrogram();
}

async function loadFile(file) {
  audio ??= new AudioContext();
  const decoded = await audio.decodeAudioData(await file.arrayBuffer());
  const mono = new Float32Array(decoded.length);
  for (let c = 0; c < decoded.numberOfChannels; c++) {
    const ch = decoded.getChannelData(c);
    for (let i = 0; i < mono.length; i++) mono[i] += ch[i] / decoded.numberOfChannels;
  }
  useSamples(mono, decoded.sampleRate);
}

await init();
$("synth").addEventListener("change", () => useSamples(synth($("synth").value), RATE));
$("file").addEventListener("change", (e) => {
  const f = e.target.files[0];
  if (f) loadFile(f).catch((err) => status(`could not decode ${f.name}: ${err}`));
});
$("repr").addEventListener("change", showSpectrogram);
$("play-input").addEventListener("click", () => play(samples, sampleRate));
$("run-augment").addEventListener("click", runAugment);
$("copy").addEventListener("input", showCopy);
$("alpha").addEventListener("input", () => ($("alpha-label").textContent = Number($("alpha").value).toFixed(2)));
$("run-stretch").addEventListener("click", runStretch);
useSamples(synth("tone"), RATE);
