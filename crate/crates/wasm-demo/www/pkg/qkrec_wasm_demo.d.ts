/* tslint:disable */
/* eslint-disable */

/**
 * Rows `{l, 2a, 2c, r3, r4, r6}` for `l = 0..=l_max`.
 */
export function constants(l_max: number): string;

/**
 * Residues of `f(q) dq/q` at every pole, including 0 and infinity, for `f = sum c_k q^k / prod (q - z^j)^m`.
 *
 * Input: `{"numerator": [[k, "c"], ...], "poles": [[j, m], ...]}` with
 * `z = exp(2 pi i / 12)`; coefficients are exact rationals or `"z^k"`.
 */
export function residues(input: string): string;

/**
 * The `tau` report for a run spec; only the bundled point table is available.
 */
export function tau(spec: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly constants: (a: number) => [number, number, number, number];
    readonly residues: (a: number, b: number) => [number, number, number, number];
    readonly tau: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
