import { ApiClient, ApiError } from "../api.js";
import { saveBytes } from "../csv.js";
import { clear, el, errorBanner, inlineError, table } from "../dom.js";
import { TEXT, explainError, formLabel, kindLabel } from "../locale.js";
import { isAcademicYearLabel } from "../validate.js";

type ReportKind = "ministry" | "individual-plan" | "supervisor-load" | "activity";

const KIND_LABELS: Record<ReportKind, string> = {
  ministry: TEXT.reportMinistry,
  "individual-plan": TEXT.reportIndividualPlan,
  "supervisor-load": TEXT.reportSupervisorLoad,
  activity: TEXT.reportActivity,
};

const NEEDS_YEAR: ReportKind[] = ["ministry", "activity"];
const NEEDS_ID: ReportKind[] = ["individual-plan", "activity"];

/** Render a report JSON document as nested tables, purely by shape. */
function renderDoc(doc: unknown): HTMLElement {
  if (Array.isArray(doc)) {
    if (doc.length === 0) return el("p", { class: "empty-state" }, TEXT.emptyList);
    if (typeof doc[0] === "object" && doc[0] !== null) {
      const headers = Object.keys(doc[0] as object);
      return table(
        headers,
        doc.map((row) => headers.map((h) => cellText((row as Record<string, unknown>)[h]))),
      );
    }
    return el("ul", {}, ...doc.map((item) => el("li", {}, cellText(item))));
  }
  if (typeof doc === "object" && doc !== null) {
    const entries = Object.entries(doc as Record<string, unknown>);
    return el(
      "dl",
      { class: "report-doc" },
      ...entries.flatMap(([key, value]) => [
        el("dt", {}, displayKey(key)),
        el("dd", {}, isScalar(value) ? cellText(value) : renderDoc(value)),
      ]),
    );
  }
  return el("span", {}, cellText(doc));
}

function isScalar(value: unknown): boolean {
  return value === null || ["string", "number", "boolean"].includes(typeof value);
}

function cellText(value: unknown): string {
  if (value === null || value === undefined) return "";
  if (typeof value === "boolean") return value ? TEXT.yes : TEXT.no;
  if (typeof value === "object") return JSON.stringify(value);
  return String(value);
}

function displayKey(key: string): string {
  // wire enum names used as JSON keys get their display labels
  const label = formLabel(key);
  return label === key ? kindLabel(key) : label;
}

export async function reportsScreen(root: HTMLElement, client: ApiClient): Promise<void> {
  clear(root);
  root.append(el("h2", {}, TEXT.reportsTitle));

  const kindSelect = el("select", {});
  for (const kind of Object.keys(KIND_LABELS) as ReportKind[]) {
    kindSelect.append(el("option", { value: kind }, KIND_LABELS[kind]));
  }
  const yearInput = el("input", { placeholder: TEXT.yearHint });
  const idInput = el("input", {});
  const hint = el("span", { class: "field-hint", id: "year-hint" });
  const output = el("div", { id: "report-output" });
  const errors = el("div", {});

  const currentPath = (): string | null => {
    const kind = kindSelect.value as ReportKind;
    const needYear = NEEDS_YEAR.includes(kind);
    if (needYear && !isAcademicYearLabel(yearInput.value)) {
      hint.textContent = TEXT.yearHint;
      return null;
    }
    hint.textContent = "";
    const params: { id?: string; year?: string } = {};
    if (needYear) params.year = yearInput.value.trim();
    if (NEEDS_ID.includes(kind)) params.id = idInput.value.trim();
    return client.reportPath(kind as never, params as never);
  };

  const generate = async (event: Event) => {
    event.preventDefault();
    clear(errors);
    const path = currentPath();
    if (path === null) return;
    clear(output);
    output.append(el("p", {}, TEXT.loading));
    try {
      const doc = await client.reportJson(path);
      clear(output);
      output.append(renderDoc(doc));
    } catch (error) {
      clear(output);
      if (error instanceof ApiError) {
        errors.append(inlineError(explainError(error.code, error.message)));
      } else {
        errors.append(errorBanner(TEXT.apiDown));
      }
    }
  };

  const download = async (event: Event) => {
    event.preventDefault();
    clear(errors);
    const path = currentPath();
    if (path === null) return;
    try {
      const bytes = await client.reportCsvBytes(path);
      const kind = kindSelect.value;
      saveBytes(bytes, `report-${kind}.csv`);
    } catch (error) {
      if (error instanceof ApiError) {
        errors.append(inlineError(explainError(error.code, error.message)));
      } else {
        errors.append(errorBanner(TEXT.apiDown));
      }
    }
  };

  root.append(
    el(
      "form",
      { class: "report-form", onsubmit: generate as EventListener },
      el("label", {}, TEXT.reportKind, kindSelect),
      el("label", {}, TEXT.academicYear, yearInput),
      el("label", {}, TEXT.doctorantId, idInput),
      el("button", { type: "submit" }, TEXT.generate),
      el("button", { type: "button", id: "download-csv", onclick: download as EventListener }, TEXT.downloadCsv),
      hint,
    ),
    errors,
    output,
  );
}
