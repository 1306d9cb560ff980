/* tslint:disable */
/* eslint-disable */

export class Gallery {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Copy `i`, wrapping around.
     */
    get(i: number): Picture;
    readonly length: number;
}

/**
 * RGBA pixels ready for `ImageData`, low frequencies at the bottom.
 */
export class Picture {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    rgba(): Uint8Array;
    readonly height: number;
    readonly width: number;
}

/**
 * All augmented copies under `protocol` (sgn, ssa, ssia, tsm, sspa, susa).
 */
export function augment(samples: Float32Array, sample_rate: number, repr: string, protocol: string, seed: number): Gallery;

/**
 * Spectrogram image of mono samples.
 */
export function render(samples: Float32Array, sample_rate: number, repr: string): Picture;

/**
 * Stretched copy for playback (ola, wsola, pv, pvpl, hpss).
 */
export function stretch(samples: Float32Array, sample_rate: number, algorithm: string, alpha: number): Float32Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_gallery_free: (a: number, b: number) => void;
    readonly __wbg_picture_free: (a: number, b: number) => void;
    readonly augment: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly gallery_get: (a: number, b: number) => number;
    readonly gallery_length: (a: number) => number;
    readonly picture_height: (a: number) => number;
    readonly picture_rgba: (a: number) => [number, number];
    readonly picture_width: (a: number) => number;
    readonly render: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly stretch: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
