/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_clockdemo_free: (a: number, b: number) => void;
export const __wbg_quenchresult_free: (a: number, b: number) => void;
export const clockdemo_advance: (a: number, b: number) => void;
export const clockdemo_magnetization: (a: number) => number;
export const clockdemo_new: (a: number, b: bigint) => [number, number, number];
export const clockdemo_side: (a: number) => number;
export const clockdemo_states: (a: number) => [number, number];
export const clockdemo_step: (a: number) => number;
export const kzmExponents: (a: number, b: number, c: number, d: number) => [number, number];
export const quenchTriangular: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const quenchresult_antivortices: (a: number) => number;
export const quenchresult_defectDensity: (a: number) => number;
export const quenchresult_order: (a: number) => number;
export const quenchresult_positions: (a: number) => [number, number];
export const quenchresult_spins: (a: number) => [number, number];
export const quenchresult_vortices: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
