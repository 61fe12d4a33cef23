export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

function makeScale(
  transform: (v: number) => number,
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = [transform(domain[0]), transform(domain[1])];
  const span = d1 - d0 || 1;
  const fn = ((value: number) =>
    range[0] + ((transform(value) - d0) / span) * (range[1] - range[0])) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  return makeScale((v) => v, domain, range);
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error("log scale needs a positive domain");
  }
  return makeScale(Math.log10, domain, range);
}

export function extent(values: number[], pad = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!(lo < hi)) {
    hi = lo + 1;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

export function decadeTicks(domain: [number, number]): number[] {
  const ticks: number[] = [];
  const lo = Math.ceil(Math.log10(domain[0]) - 1e-9);
  const hi = Math.floor(Math.log10(domain[1]) + 1e-9);
  for (let k = lo; k <= hi; k += 1) ticks.push(10 ** k);
  return ticks;
}

export function linearTicks(domain: [number, number], count = 6): number[] {
  const raw = (domain[1] - domain[0]) / count;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= raw) ?? raw;
  const start = Math.ceil(domain[0] / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= domain[1] + 1e-12 * step; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

/** Least-squares slope and intercept of y against x. */
export function leastSquares(x: number[], y: number[]): { slope: number; intercept: number } {
  const n = x.length;
  if (n < 2) throw new Error("need at least two points to fit");
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i += 1) {
    sxx += (x[i] - mx) ** 2;
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}

/** Power-law exponent of a positive series: slope in log-log coordinates. */
export function loglogSlope(t: number[], v: number[]): number {
  const keep: number[] = [];
  t.forEach((ti, i) => {
    if (ti > 0 && v[i] > 0) keep.push(i);
  });
  return leastSquares(
    keep.map((i) => Math.log10(t[i])),
    keep.map((i) => Math.log10(v[i])),
  ).slope;
}
