/* tslint:disable */
/* eslint-disable */

/**
 * Verdict for E(kappa, tau) as JSON: `{"tag", "allowed_h_interval", "citation"}`.
 */
export function feasibility(kappa: number, tau: number): string;

/**
 * Vertex coordinates `x, y, z` of a `(cells + 1)²` mesh, row-major in `s`.
 */
export function q_one_mesh(delta: number, alpha0: number, alpha_prime0: number, size: number, cells: number): Float64Array;

/**
 * Rows of `(s, h(s) − h(s0), H, Re P)` flattened, `n` rows.
 */
export function rotational_profile(kappa: number, a: number, b: number, s0: number, s1: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly feasibility: (a: number, b: number) => [number, number, number, number];
    readonly q_one_mesh: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly rotational_profile: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
