/** Axis scales and tick placement. */

export type ScaleKind = "linear" | "log";

export interface Scale {
  readonly domain: [number, number];
  readonly range: [number, number];
  map(x: number): number;
  ticks(target?: number): number[];
}

function niceStep(rough: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  const mantissa = rough / power;
  const mult = mantissa <= 1 ? 1 : mantissa <= 2 ? 2 : mantissa <= 5 ? 5 : 10;
  return mult * power;
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const step = niceStep((hi - lo) / target);
  const out: number[] = [];
  for (let v = Math.ceil(lo / step - 1e-9) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function logTicks(lo: number, hi: number): number[] {
  const decades: number[] = [];
  const e0 = Math.ceil(Math.log10(lo) - 1e-9);
  const e1 = Math.floor(Math.log10(hi) + 1e-9);
  for (let e = e0; e <= e1; e++) decades.push(Math.pow(10, e));
  if (decades.length >= 2) return decades;
  // less than a full decade: use 1-2-5 mantissas instead
  const fine: number[] = [];
  for (let e = Math.floor(Math.log10(lo)) - 1; e <= e1 + 1; e++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, e);
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) fine.push(v);
    }
  }
  return fine.length > 0 ? fine : [lo, hi];
}

export function makeScale(kind: ScaleKind, domain: [number, number],
                          range: [number, number]): Scale {
  const [r0, r1] = range;
  if (kind === "log") {
    if (!(domain[0] > 0 && domain[1] > 0)) {
      throw new Error(`log scale needs a positive domain, got ${domain}`);
    }
    const l0 = Math.log10(domain[0]);
    const span = Math.log10(domain[1]) - l0;
    return {
      domain, range,
      map: (x) => r0 + ((Math.log10(x) - l0) / span) * (r1 - r0),
      ticks: () => logTicks(domain[0], domain[1]),
    };
  }
  const d0 = domain[0];
  const span = domain[1] - d0;
  return {
    domain, range,
    map: (x) => r0 + ((x - d0) / span) * (r1 - r0),
    ticks: (target?: number) => linearTicks(domain[0], domain[1], target),
  };
}

export function fmtTick(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1e4 || a < 1e-3) return x.toExponential(0).replace("e+", "e");
  return String(parseFloat(x.toPrecision(6)));
}
