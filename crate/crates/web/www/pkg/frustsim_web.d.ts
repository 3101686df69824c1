/* tslint:disable */
/* eslint-disable */

/**
 * Six-state clock model coarsening on an `l × l` honeycomb grid.
 */
export class ClockDemo {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number): void;
    constructor(l: number, seed: bigint);
    /**
     * Clock states `0..6`, row-major in grid coordinates.
     */
    states(): Uint8Array;
    readonly magnetization: number;
    readonly side: number;
    readonly step: number;
}

export class QuenchResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly antivortices: number;
    /**
     * Mean vortex plus antivortex density over all reads.
     */
    readonly defectDensity: number;
    /**
     * Mean three-sublattice order parameter over all reads.
     */
    readonly order: number;
    /**
     * Interleaved `x, y` drawing positions of the logical spins.
     */
    readonly positions: Float64Array;
    /**
     * Logical spins of the first read.
     */
    readonly spins: Int8Array;
    readonly vortices: number;
}

/**
 * Kibble-Zurek exponents `[order parameter, defects, correlation length]`.
 */
export function kzmExponents(nu: number, beta: number, z: number, d: number): Float64Array;

/**
 * Anneals the triangular model on an `lx × ly` cylinder and summarizes
 * `reads` reads. Defect counts refer to the first read.
 */
export function quenchTriangular(lx: number, ly: number, t_a: number, reads: number, seed: bigint): QuenchResult;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_clockdemo_free: (a: number, b: number) => void;
    readonly __wbg_quenchresult_free: (a: number, b: number) => void;
    readonly clockdemo_advance: (a: number, b: number) => void;
    readonly clockdemo_magnetization: (a: number) => number;
    readonly clockdemo_new: (a: number, b: bigint) => [number, number, number];
    readonly clockdemo_side: (a: number) => number;
    readonly clockdemo_states: (a: number) => [number, number];
    readonly clockdemo_step: (a: number) => number;
    readonly kzmExponents: (a: number, b: number, c: number, d: number) => [number, number];
    readonly quenchTriangular: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly quenchresult_antivortices: (a: number) => number;
    readonly quenchresult_defectDensity: (a: number) => number;
    readonly quenchresult_order: (a: number) => number;
    readonly quenchresult_positions: (a: number) => [number, number];
    readonly quenchresult_spins: (a: number) => [number, number];
    readonly quenchresult_vortices: (a: number) => number;
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
