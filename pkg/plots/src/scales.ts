/** Minimal linear/log axis scales with tick generation. */

export interface Scale {
  (value: number): number;
  ticks(): number[];
  domain: [number, number];
}

function niceLinearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const rawStep = span / target;
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = base;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * base;
    if (span / step <= target) break;
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.ticks = () => niceLinearTicks(d0, d1);
  scale.domain = domain;
  return scale;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (!(d0 > 0) || !(d1 > 0)) {
    throw new Error("log scale requires a strictly positive domain");
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const [r0, r1] = range;
  const span = l1 - l0 || 1;
  const scale = ((value: number) =>
    r0 + ((Math.log10(value) - l0) / span) * (r1 - r0)) as Scale;
  scale.ticks = () => {
    const ticks: number[] = [];
    for (let k = Math.ceil(l0 - 1e-9); k <= Math.floor(l1 + 1e-9); k += 1) {
      ticks.push(Math.pow(10, k));
    }
    return ticks.length >= 2 ? ticks : [d0, d1];
  };
  scale.domain = domain;
  return scale;
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) {
    const exp = Math.round(Math.log10(abs));
    const mant = value / Math.pow(10, exp);
    return Math.abs(mant - 1) < 1e-9 ? `1e${exp}` : `${mant.toPrecision(2)}e${exp}`;
  }
  return `${Number(value.toPrecision(6))}`;
}
