/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_gallery_free: (a: number, b: number) => void;
export const __wbg_picture_free: (a: number, b: number) => void;
export const augment: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const gallery_get: (a: number, b: number) => number;
export const gallery_length: (a: number) => number;
export const picture_height: (a: number) => number;
export const picture_rgba: (a: number) => [number, number];
export const picture_width: (a: number) => number;
export const render: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const stretch: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
