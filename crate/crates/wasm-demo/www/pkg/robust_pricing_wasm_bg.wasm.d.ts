/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_lotteryview_detPrice: (a: number) => number;
export const __wbg_get_lotteryview_detRatio: (a: number) => number;
export const __wbg_get_lotteryview_lower: (a: number) => number;
export const __wbg_get_lotteryview_mixtureRatio: (a: number) => number;
export const __wbg_get_lotteryview_pi1: (a: number) => number;
export const __wbg_get_lotteryview_pi2: (a: number) => number;
export const __wbg_get_lotteryview_ratio: (a: number) => number;
export const __wbg_lotteryview_free: (a: number, b: number) => void;
export const __wbg_set_lotteryview_detPrice: (a: number, b: number) => void;
export const __wbg_set_lotteryview_detRatio: (a: number, b: number) => void;
export const __wbg_set_lotteryview_lower: (a: number, b: number) => void;
export const __wbg_set_lotteryview_mixtureRatio: (a: number, b: number) => void;
export const __wbg_set_lotteryview_pi1: (a: number, b: number) => void;
export const __wbg_set_lotteryview_pi2: (a: number, b: number) => void;
export const __wbg_set_lotteryview_ratio: (a: number, b: number) => void;
export const deterministicRatioCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const lotteryView: (a: number, b: number, c: number) => [number, number, number];
export const lotteryview_cdf: (a: number) => [number, number];
export const ratioCurves: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
