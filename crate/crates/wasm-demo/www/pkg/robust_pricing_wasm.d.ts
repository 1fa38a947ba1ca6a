/* tslint:disable */
/* eslint-disable */

export class LotteryView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    detPrice: number;
    detRatio: number;
    lower: number;
    mixtureRatio: number;
    pi1: number;
    pi2: number;
    ratio: number;
    readonly cdf: Float64Array;
}

export function deterministicRatioCurve(mu: number, sigma: number, points: number): Float64Array;

export function lotteryView(mu: number, sigma: number, points: number): LotteryView;

export function ratioCurves(r_max: number, step: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_lotteryview_detPrice: (a: number) => number;
    readonly __wbg_get_lotteryview_detRatio: (a: number) => number;
    readonly __wbg_get_lotteryview_lower: (a: number) => number;
    readonly __wbg_get_lotteryview_mixtureRatio: (a: number) => number;
    readonly __wbg_get_lotteryview_pi1: (a: number) => number;
    readonly __wbg_get_lotteryview_pi2: (a: number) => number;
    readonly __wbg_get_lotteryview_ratio: (a: number) => number;
    readonly __wbg_lotteryview_free: (a: number, b: number) => void;
    readonly __wbg_set_lotteryview_detPrice: (a: number, b: number) => void;
    readonly __wbg_set_lotteryview_detRatio: (a: number, b: number) => void;
    readonly __wbg_set_lotteryview_lower: (a: number, b: number) => void;
    readonly __wbg_set_lotteryview_mixtureRatio: (a: number, b: number) => void;
    readonly __wbg_set_lotteryview_pi1: (a: number, b: number) => void;
    readonly __wbg_set_lotteryview_pi2: (a: number, b: number) => void;
    readonly __wbg_set_lotteryview_ratio: (a: number, b: number) => void;
    readonly deterministicRatioCurve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly lotteryView: (a: number, b: number, c: number) => [number, number, number];
    readonly lotteryview_cdf: (a: number) => [number, number];
    readonly ratioCurves: (a: number, b: number) => [number, number, number, number];
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
