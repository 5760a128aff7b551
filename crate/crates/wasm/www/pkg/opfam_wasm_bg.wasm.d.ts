/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_bracketview_free: (a: number, b: number) => void;
export const __wbg_gridview_free: (a: number, b: number) => void;
export const bracketRoots: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const bracketview_backward: (a: number) => [number, number];
export const bracketview_finalRoot: (a: number) => number;
export const bracketview_forward: (a: number) => [number, number];
export const bracketview_verdict: (a: number) => [number, number];
export const familySpectrum: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const gridview_classes: (a: number) => [number, number];
export const gridview_count: (a: number, b: number) => number;
export const gridview_nx: (a: number) => number;
export const gridview_ny: (a: number) => number;
export const gridview_rect: (a: number) => [number, number];
export const localSpectrum: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
