/* tslint:disable */
/* eslint-disable */

/**
 * Bracket norms and roots in both orders with the root-test verdict.
 */
export class BracketView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `ρ_n(S, T)` for `n = 1..=n_max`.
     */
    readonly backward: Float64Array;
    readonly finalRoot: number;
    /**
     * `ρ_n(T, S)` for `n = 1..=n_max`.
     */
    readonly forward: Float64Array;
    readonly verdict: string;
}

/**
 * A classified grid. Cell `k` has real index `k % nx` and imaginary index
 * `k / nx`, counted from `re_min` and `im_min`.
 */
export class GridView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    count(code: string): number;
    /**
     * One character per cell: `S`, `U` or `R`.
     */
    readonly classes: string;
    readonly nx: number;
    readonly ny: number;
    /**
     * `[re_min, re_max, im_min, im_max]`.
     */
    readonly rect: Float64Array;
}

export function bracketRoots(t_text: string, s_text: string, n_max: number): BracketView;

export function familySpectrum(family_text: string, res: number, rect: string, grid: string): GridView;

export function localSpectrum(family_text: string, x_text: string, res: number, rect: string, grid: string): GridView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_bracketview_free: (a: number, b: number) => void;
    readonly __wbg_gridview_free: (a: number, b: number) => void;
    readonly bracketRoots: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly bracketview_backward: (a: number) => [number, number];
    readonly bracketview_finalRoot: (a: number) => number;
    readonly bracketview_forward: (a: number) => [number, number];
    readonly bracketview_verdict: (a: number) => [number, number];
    readonly familySpectrum: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly gridview_classes: (a: number) => [number, number];
    readonly gridview_count: (a: number, b: number) => number;
    readonly gridview_nx: (a: number) => number;
    readonly gridview_ny: (a: number) => number;
    readonly gridview_rect: (a: number) => [number, number];
    readonly localSpectrum: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
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
