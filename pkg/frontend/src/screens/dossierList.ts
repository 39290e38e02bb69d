import { ApiClient, ApiError, Dossier, DossierFilters } from "../api.js";
import { clear, el, errorBanner, inlineError } from "../dom.js";
import {
  FORM_VALUES,
  STATUS_VALUES,
  TEXT,
  explainError,
  formLabel,
  statusLabel,
} from "../locale.js";
import { isAcademicYearLabel } from "../validate.js";

function filterBar(filters: DossierFilters, onApply: (f: DossierFilters) => void): HTMLElement {
  const status = el("select", { name: "status" }, el("option", { value: "" }, TEXT.filterAll));
  for (const value of STATUS_VALUES) {
    status.append(el("option", { value }, statusLabel(value)));
  }
  if (filters.status) status.value = filters.status;
  const form = el("select", { name: "form" }, el("option", { value: "" }, TEXT.filterAll));
  for (const value of FORM_VALUES) {
    form.append(el("option", { value }, formLabel(value)));
  }
  if (filters.form) form.value = filters.form;
  const year = el("input", { name: "year", placeholder: TEXT.yearHint, value: filters.year ?? "" });
  const name = el("input", { name: "name", value: filters.name ?? "" });
  const hint = el("span", { class: "field-hint" });

  const apply = () => {
    if (year.value.trim() && !isAcademicYearLabel(year.value)) {
      hint.textContent = TEXT.yearHint;
      return;
    }
    hint.textContent = "";
    onApply({
      status: status.value || undefined,
      form: form.value || undefined,
      year: year.value.trim() || undefined,
      name: name.value.trim() || undefined,
    });
  };
  return el(
    "form",
    {
      class: "filter-bar",
      onsubmit: ((event: Event) => {
        event.preventDefault();
        apply();
      }) as EventListener,
    },
    el("label", {}, TEXT.filterStatus, status),
    el("label", {}, TEXT.filterForm, form),
    el("label", {}, TEXT.filterYear, year),
    el("label", {}, TEXT.filterName, name),
    el("button", { type: "submit" }, TEXT.filterApply),
    hint,
  );
}

function createForm(client: ApiClient, onCreated: (d: Dossier) => void): HTMLElement {
  const family = el("input", { name: "family_name", required: true });
  const given = el("input", { name: "given_name", required: true });
  const national = el("input", { name: "national_id" });
  const errorSlot = el("div", {});
  const submit = async (event: Event) => {
    event.preventDefault();
    clear(errorSlot);
    try {
      const dossier = await client.createDossier({
        family_name: family.value,
        given_name: given.value,
        national_id: national.value.trim() || null,
      });
      onCreated(dossier);
    } catch (error) {
      if (error instanceof ApiError) {
        errorSlot.append(inlineError(explainError(error.code, error.message)));
      } else {
        errorSlot.append(errorBanner(TEXT.apiDown));
      }
    }
  };
  return el(
    "form",
    { class: "create-form", onsubmit: submit as EventListener },
    el("h3", {}, TEXT.newDossier),
    el("label", {}, TEXT.familyName, family),
    el("label", {}, TEXT.givenName, given),
    el("label", {}, TEXT.nationalId, national),
    el("button", { type: "submit" }, TEXT.submitCreate),
    errorSlot,
  );
}

export async function dossierListScreen(
  root: HTMLElement,
  client: ApiClient,
  filters: DossierFilters,
  openDossier: (id: string) => void,
): Promise<void> {
  clear(root);
  root.append(el("h2", {}, TEXT.navDossiers));
  const listSlot = el("div", { id: "dossier-list" });
  root.append(
    filterBar(filters, (next) => void render(next)),
    listSlot,
    createForm(client, (dossier) => openDossier(dossier.id)),
  );

  async function render(activeFilters: DossierFilters): Promise<void> {
    clear(listSlot);
    listSlot.append(el("p", {}, TEXT.loading));
    let dossiers: Dossier[];
    try {
      dossiers = await client.listDossiers(activeFilters);
    } catch (error) {
      clear(listSlot);
      const text =
        error instanceof ApiError ? explainError(error.code, error.message) : TEXT.apiDown;
      listSlot.append(errorBanner(text));
      return;
    }
    clear(listSlot);
    if (dossiers.length === 0) {
      listSlot.append(el("p", { class: "empty-state" }, TEXT.emptyList));
      return;
    }
    const head = el(
      "tr",
      {},
      ...[TEXT.colId, TEXT.colFamilyName, TEXT.colGivenName, TEXT.colStatus, TEXT.colForm,
          TEXT.colEnrolledOn, TEXT.colTopic].map((h) => el("th", {}, h)),
    );
    const body = dossiers.map((d) =>
      el(
        "tr",
        {
          class: "dossier-row",
          "data-id": d.id,
          onclick: (() => openDossier(d.id)) as EventListener,
        },
        el("td", {}, d.id),
        el("td", {}, d.family_name),
        el("td", {}, d.given_name),
        el("td", {}, statusLabel(d.status)),
        el("td", {}, d.enrollment ? formLabel(d.enrollment.form) : ""),
        el("td", {}, d.enrollment ? d.enrollment.enrollment_date : ""),
        el("td", {}, d.topics.length ? d.topics[d.topics.length - 1].title : ""),
      ),
    );
    listSlot.append(el("table", {}, el("thead", {}, head), el("tbody", {}, ...body)));
  }

  await render(filters);
}
