/** Input-format hints. Display-side only; the service is the authority. */

const YEAR_LABEL = /^(\d{4})\/(\d{4})$/;

export function isAcademicYearLabel(text: string): boolean {
  const match = YEAR_LABEL.exec(text.trim());
  if (!match) return false;
  return Number(match[2]) === Number(match[1]) + 1;
}
