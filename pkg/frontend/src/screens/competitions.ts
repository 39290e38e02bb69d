import { ApiClient, ApiError } from "../api.js";
import { clear, el, errorBanner, inlineError, table } from "../dom.js";
import { FORM_VALUES, TEXT, competitionStateLabel, explainError, formLabel } from "../locale.js";

export async function competitionsScreen(root: HTMLElement, client: ApiClient): Promise<void> {
  clear(root);
  root.append(el("h2", {}, TEXT.competitionsTitle));
  const listSlot = el("div", {});
  const errors = el("div", {});

  async function render(): Promise<void> {
    clear(listSlot);
    clear(errors);
    try {
      const competitions = await client.listCompetitions();
      if (competitions.length === 0) {
        listSlot.append(el("p", { class: "empty-state" }, TEXT.emptyList));
        return;
      }
      const rows = competitions.map((c) => [
        c.id,
        c.announced_on,
        c.speciality,
        formLabel(c.form),
        c.deadline,
        competitionStateLabel(c.state),
        el("button", {
          type: "button",
          onclick: (async () => {
            clear(errors);
            try {
              await client.closeCompetition(c.id);
              await render();
            } catch (error) {
              if (error instanceof ApiError) {
                errors.append(inlineError(explainError(error.code, error.message)));
              }
            }
          }) as EventListener,
        }, TEXT.closeCompetition),
      ]);
      listSlot.append(
        table(
          [TEXT.colId, TEXT.announcedOn, TEXT.speciality, TEXT.filterForm, TEXT.deadline, TEXT.state, ""],
          rows,
        ),
      );
    } catch (error) {
      const text =
        error instanceof ApiError ? explainError(error.code, error.message) : TEXT.apiDown;
      listSlot.append(errorBanner(text));
    }
  }

  const announced = el("input", { type: "date", required: true });
  const speciality = el("input", { required: true });
  const form = el("select", {});
  for (const value of FORM_VALUES) form.append(el("option", { value }, formLabel(value)));
  const deadline = el("input", { type: "date", required: true });

  const submit = async (event: Event) => {
    event.preventDefault();
    clear(errors);
    try {
      await client.createCompetition({
        announced_on: announced.value,
        speciality: speciality.value,
        form: form.value,
        deadline: deadline.value,
      });
      await render();
    } catch (error) {
      if (error instanceof ApiError) {
        errors.append(inlineError(explainError(error.code, error.message)));
      } else {
        errors.append(errorBanner(TEXT.apiDown));
      }
    }
  };

  root.append(
    listSlot,
    el(
      "form",
      { class: "create-form", onsubmit: submit as EventListener },
      el("h3", {}, TEXT.newCompetition),
      el("label", {}, TEXT.announcedOn, announced),
      el("label", {}, TEXT.speciality, speciality),
      el("label", {}, TEXT.filterForm, form),
      el("label", {}, TEXT.deadline, deadline),
      el("button", { type: "submit" }, TEXT.submitCreate),
      errors,
    ),
  );
  await render();
}
