import { ApiClient, ApiError } from "../api.js";
import { clear, el, errorBanner, inlineError, table } from "../dom.js";
import { TEXT, explainError } from "../locale.js";

export async function supervisorsScreen(root: HTMLElement, client: ApiClient): Promise<void> {
  clear(root);
  root.append(el("h2", {}, TEXT.supervisorsTitle));
  const listSlot = el("div", {});
  const errors = el("div", {});

  const family = el("input", { required: true });
  const given = el("input", { required: true });
  const habilitated = el("input", { type: "checkbox", checked: true });
  const title = el("input", {});
  const department = el("input", {});

  async function render(): Promise<void> {
    clear(listSlot);
    try {
      const supervisors = await client.listSupervisors();
      if (supervisors.length === 0) {
        listSlot.append(el("p", { class: "empty-state" }, TEXT.emptyList));
        return;
      }
      listSlot.append(
        table(
          [TEXT.colId, TEXT.familyName, TEXT.givenName, TEXT.habilitated, TEXT.academicTitle, TEXT.department],
          supervisors.map((s) => [
            s.id,
            s.family_name,
            s.given_name,
            s.habilitated ? TEXT.yes : TEXT.no,
            s.academic_title ?? "",
            s.department ?? "",
          ]),
        ),
      );
    } catch (error) {
      const text =
        error instanceof ApiError ? explainError(error.code, error.message) : TEXT.apiDown;
      listSlot.append(errorBanner(text));
    }
  }

  const submit = async (event: Event) => {
    event.preventDefault();
    clear(errors);
    try {
      await client.createSupervisor({
        family_name: family.value,
        given_name: given.value,
        habilitated: habilitated.checked,
        academic_title: title.value.trim() || null,
        department: department.value.trim() || null,
      });
      family.value = given.value = title.value = department.value = "";
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
      el("h3", {}, TEXT.newSupervisor),
      el("label", {}, TEXT.familyName, family),
      el("label", {}, TEXT.givenName, given),
      el("label", {}, TEXT.habilitated, habilitated),
      el("label", {}, TEXT.academicTitle, title),
      el("label", {}, TEXT.department, department),
      el("button", { type: "submit" }, TEXT.submitCreate),
      errors,
    ),
  );
  await render();
}
