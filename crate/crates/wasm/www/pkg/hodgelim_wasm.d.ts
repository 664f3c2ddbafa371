/* tslint:disable */
/* eslint-disable */

export function example(name: string): string;

/**
 * Names of the bundled example scenarios.
 */
export function example_names(): string;

/**
 * Error table for e^{-N(x)} Ŷ(z(m)) against the limiting grading, m = 1..=m_max.
 */
export function limit_table(scenario: string, sequence: string, m_max: number, tol: number): string;

/**
 * Admissibility and relative weight checks.
 */
export function validate(scenario: string, seed: number): string;

/**
 * Zero test of the normal function at the punctured-disc point s, given as
 * interleaved (re, im) pairs.
 */
export function zero_test(scenario: string, s: Float64Array, tol: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly example: (a: number, b: number) => [number, number, number, number];
    readonly example_names: () => [number, number];
    readonly limit_table: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly validate: (a: number, b: number, c: number) => [number, number, number, number];
    readonly zero_test: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
