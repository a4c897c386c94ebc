/** The 1..9 comparison scale offered by the judgment picker. */

export interface SaatyOption {
  label: string;
  value: number;
}

/** All 17 admissible judgment values, strongest preference first. */
export const SAATY_OPTIONS: SaatyOption[] = (() => {
  const out: SaatyOption[] = [];
  for (let k = 9; k >= 2; k--) {
    out.push({ label: String(k), value: k });
  }
  out.push({ label: "1", value: 1 });
  for (let k = 2; k <= 9; k++) {
    out.push({ label: `1/${k}`, value: 1 / k });
  }
  return out;
})();

/** Render a judgment value the way the picker shows it ("3", "1/3"). */
export function formatSaaty(value: number): string {
  const match = SAATY_OPTIONS.find(
    (o) => Math.abs(o.value - value) < 1e-9,
  );
  if (match) {
    return match.label;
  }
  return value.toFixed(4);
}
