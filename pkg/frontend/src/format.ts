/** Clock and label helpers; times arrive as minutes from midnight and are
 * rendered in hub-local clock with +1d markers past midnight. */

export function clock(minutes: number): string {
  const day = Math.floor(minutes / 1440);
  const rest = ((minutes % 1440) + 1440) % 1440;
  const h = Math.floor(rest / 60);
  const m = Math.round(rest % 60);
  const base = `${String(h).padStart(2, "0")}:${String(m).padStart(2, "0")}`;
  return day > 0 ? `${base}+${day}d` : base;
}

export function pct(x: number): string {
  return `${x.toFixed(2)}%`;
}

export function minutes(x: number): string {
  return `${x.toFixed(1)} min`;
}
