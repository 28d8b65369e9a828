/**
 * Canonical reference-slope sets for the eight study configurations, one per
 * published convergence figure: exponent of the dashed guide line and the
 * curve it is anchored to (second data point).
 */

import { RefSpec } from "./series.js";

export const FIGURE_REFS: Record<string, RefSpec[]> = {
  smooth_1d_equal: [
    { exponent: -1 / 2, column: "estimators" },
    { exponent: -1, column: "estimators_u" },
  ],
  smooth_1d_parabolic: [
    { exponent: -1 / 3, column: "estimators" },
    { exponent: -2 / 3, column: "estimators_u" },
  ],
  nonsmooth_1d_equal: [
    { exponent: -0.38, column: "estimators" },
    { exponent: -0.63, column: "estimators_u" },
    { exponent: -1, column: "estimators_u1" },
  ],
  nonsmooth_1d_parabolic: [
    { exponent: -1 / 3, column: "estimators" },
    { exponent: -1 / 2, column: "estimators_sigma" },
    { exponent: -2 / 3, column: "estimators_u" },
  ],
  smooth_2d_equal: [
    { exponent: -1 / 3, column: "estimators" },
    { exponent: -2 / 3, column: "estimators_u" },
  ],
  smooth_2d_parabolic: [
    { exponent: -1 / 4, column: "estimators" },
    { exponent: -1 / 2, column: "estimators_u" },
  ],
  nonsmooth_2d_equal: [
    { exponent: -1 / 4, column: "estimators" },
    { exponent: -1 / 2, column: "estimators_u" },
  ],
  nonsmooth_2d_parabolic: [
    { exponent: -1 / 4, column: "estimators" },
    { exponent: -3 / 8, column: "estimators_u0" },
    { exponent: -1 / 2, column: "estimators_u" },
    { exponent: -1 / 2, column: "estimators_u1" },
  ],
};
