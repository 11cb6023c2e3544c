// Exact decimal rendering of rationals, mirroring the service's integer
// algorithm digit for digit (4 significant digits, round half to even).
// BigInt throughout: the UI must show exactly what the service computed.

const pow10 = (k: number): bigint => 10n ** BigInt(k);

function roundHalfEven(numer: bigint, denom: bigint): bigint {
  const q = numer / denom;
  const twiceRest = 2n * (numer % denom);
  if (twiceRest < denom) return q;
  if (twiceRest > denom) return q + 1n;
  return q % 2n === 0n ? q : q + 1n;
}

export function formatSignificant(num: bigint, den: bigint, sig = 4): string {
  if (num === 0n) return "0";
  const sign = num < 0n !== den < 0n ? "-" : "";
  const n = num < 0n ? -num : num;
  const d = den < 0n ? -den : den;

  // exponent e with 10^e <= n/d < 10^(e+1), cross-multiplied for negative e
  let e = n.toString().length - d.toString().length;
  const tooBig = (k: number) => (k >= 0 ? pow10(k) * d > n : d > n * pow10(-k));
  const fits = (k: number) => (k >= 0 ? pow10(k) * d <= n : d <= n * pow10(-k));
  while (tooBig(e)) e -= 1;
  while (fits(e + 1)) e += 1;

  const shift = sig - 1 - e;
  const scaledNum = shift >= 0 ? n * pow10(shift) : n;
  const scaledDen = shift >= 0 ? d : d * pow10(-shift);
  let q = roundHalfEven(scaledNum, scaledDen);
  let digits = q.toString();
  if (digits.length > sig) {
    q = q / 10n;
    e += 1;
    digits = q.toString();
  }

  let text: string;
  if (e >= sig - 1) {
    text = digits + "0".repeat(e - sig + 1);
  } else if (e >= 0) {
    text = digits.slice(0, e + 1) + "." + digits.slice(e + 1);
  } else {
    text = "0." + "0".repeat(-e - 1) + digits;
  }
  return sign + text;
}

export function formatPercent(num: bigint, den: bigint, sig = 4): string {
  return formatSignificant(num * 100n, den, sig) + "%";
}

/** Bar width in [0, 100], float is fine for geometry (never for labels). */
export function percentWidth(num: bigint, den: bigint): number {
  if (den === 0n) return 0;
  return Number((num * 10000n) / den) / 100;
}
