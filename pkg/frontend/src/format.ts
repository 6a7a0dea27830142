// Single source of display formatting. Tests compare rendered text
// against these helpers applied to recorded API responses, so any
// number shown in the UI must pass through here.

export function fmtScore(x: number): string {
  return x.toFixed(4);
}

export function fmtDelta(d: number): string {
  return (d >= 0 ? "+" : "") + d.toFixed(4);
}

export function fmtWeight(w: number): string {
  return String(w);
}

export function fmtWallTime(seconds: number): string {
  if (seconds >= 1) {
    return `${seconds.toFixed(2)} s`;
  }
  return `${(seconds * 1000).toFixed(1)} ms`;
}

export function fmtCount(n: number): string {
  return n.toLocaleString("en-US");
}
