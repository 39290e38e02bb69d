import { ApiClient, ApiError, Dossier, Supervisor } from "../api.js";
import { clear, el, errorBanner, inlineError, table } from "../dom.js";
import {
  ACTIVITY_KIND_VALUES,
  FORM_VALUES,
  OUTCOME_VALUES,
  TEXT,
  explainError,
  formLabel,
  kindLabel,
  outcomeLabel,
  statusLabel,
} from "../locale.js";
import { isAcademicYearLabel } from "../validate.js";

type Rerender = (dossier: Dossier) => void;

/** One action form: gathers fields, posts, re-renders from the response. */
function actionForm(
  title: string,
  fields: HTMLElement[],
  submitLabel: string,
  action: () => Promise<Dossier>,
  rerender: Rerender,
  beforeSubmit?: () => string | null,
): HTMLElement {
  const errorSlot = el("div", { class: "form-errors" });
  const submit = async (event: Event) => {
    event.preventDefault();
    clear(errorSlot);
    if (beforeSubmit) {
      const hint = beforeSubmit();
      if (hint) {
        errorSlot.append(inlineError(hint));
        return;
      }
    }
    try {
      rerender(await action());
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
    { class: "action-form", "data-action": title, onsubmit: submit as EventListener },
    el("h4", {}, title),
    ...fields,
    el("button", { type: "submit" }, submitLabel),
    errorSlot,
  );
}

function labelled(text: string, control: HTMLElement): HTMLElement {
  return el("label", {}, text, control);
}

function selectControl(values: string[], display: (v: string) => string): HTMLSelectElement {
  const control = el("select", {});
  for (const value of values) control.append(el("option", { value }, display(value)));
  return control;
}

function identitySection(d: Dossier): HTMLElement {
  const rows: [string, string][] = [
    [TEXT.colId, d.id],
    [TEXT.familyName, d.family_name],
    [TEXT.givenName, d.given_name],
    [TEXT.nationalId, d.national_id ?? ""],
    [TEXT.colStatus, statusLabel(d.status)],
    [TEXT.competition, d.competition ?? ""],
  ];
  if (d.enrollment) {
    rows.push(
      [TEXT.filterForm, formLabel(d.enrollment.form)],
      [TEXT.enrollmentDate, d.enrollment.enrollment_date],
      [TEXT.termMonths, String(d.enrollment.term_months)],
      [TEXT.basis, d.enrollment.basis],
    );
  }
  if (d.dismissal) {
    rows.push(
      [TEXT.dismissalDate, d.dismissal.date],
      [TEXT.rightOfDefense, d.dismissal.right_of_defense ? TEXT.yes : TEXT.no],
    );
  }
  if (d.defense) {
    rows.push(
      [TEXT.defenseDate, d.defense.date],
      [TEXT.outcome, outcomeLabel(d.defense.outcome)],
    );
  }
  return el(
    "section",
    { class: "identity" },
    el("h3", {}, TEXT.identity),
    el(
      "dl",
      {},
      ...rows.flatMap(([k, v]) => [el("dt", {}, k), el("dd", {}, v)]),
    ),
  );
}

function topicSection(d: Dossier): HTMLElement {
  // all versions as delivered: seq order, oldest first
  return el(
    "section",
    { class: "topics" },
    el("h3", {}, TEXT.topicHistory),
    table(
      [TEXT.colSeqNo, TEXT.colTitle, TEXT.colEffectiveDate],
      d.topics.map((t) => [String(t.seq_no), t.title, t.effective_date]),
    ),
  );
}

function supervisionSection(
  d: Dossier,
  supervisors: Supervisor[],
  client: ApiClient,
  rerender: Rerender,
): HTMLElement {
  const byId = new Map(supervisors.map((s) => [s.id, s]));
  const displayName = (id: string) => {
    const s = byId.get(id);
    return s ? `${s.family_name} ${s.given_name}` : id;
  };
  const current = d.supervisions.filter((s) => s.end_date === null);
  const former = d.supervisions.filter((s) => s.end_date !== null);

  const endForms = current.map((s) => {
    const endDate = el("input", { type: "date", required: true });
    return actionForm(
      `${TEXT.endSupervision}: ${displayName(s.supervisor_id)}`,
      [labelled(TEXT.endDate, endDate)],
      TEXT.endSupervision,
      () => client.endSupervision(d.id, s.supervisor_id, endDate.value),
      rerender,
    );
  });

  const assignable = supervisors;
  const choice = el("select", {});
  for (const s of assignable) {
    choice.append(el("option", { value: s.id }, `${s.family_name} ${s.given_name}`));
  }
  const startDate = el("input", { type: "date", required: true });
  const assign = actionForm(
    TEXT.assignSupervisor,
    [labelled(TEXT.supervisors, choice), labelled(TEXT.startDate, startDate)],
    TEXT.assignSupervisor,
    () => client.assignSupervisor(d.id, { supervisor_id: choice.value, start_date: startDate.value }),
    rerender,
  );

  return el(
    "section",
    { class: "supervisions" },
    el("h3", {}, TEXT.supervisors),
    el("h4", {}, TEXT.currentSupervisors),
    table(
      [TEXT.supervisors, TEXT.startDate],
      current.map((s) => [displayName(s.supervisor_id), s.start_date]),
    ),
    el("h4", {}, TEXT.formerSupervisors),
    table(
      [TEXT.supervisors, TEXT.startDate, TEXT.endDate],
      former.map((s) => [displayName(s.supervisor_id), s.start_date, s.end_date ?? ""]),
    ),
    ...endForms,
    assign,
  );
}

function examSection(d: Dossier, client: ApiClient, rerender: Rerender): HTMLElement {
  const subject = el("input", { required: true });
  const date = el("input", { type: "date", required: true });
  const grade = el("input", { required: true, placeholder: "5.50" });
  return el(
    "section",
    { class: "exams" },
    el("h3", {}, TEXT.exams),
    table(
      [TEXT.colSubject, TEXT.colDate, TEXT.colGrade, TEXT.colPassed],
      d.exams.map((e) => [e.subject, e.date, e.grade, e.passed ? TEXT.yes : TEXT.no]),
    ),
    actionForm(
      TEXT.addExam,
      [labelled(TEXT.colSubject, subject), labelled(TEXT.colDate, date), labelled(TEXT.colGrade, grade)],
      TEXT.submit,
      () => client.addExam(d.id, { subject: subject.value, date: date.value, grade: grade.value }),
      rerender,
    ),
  );
}

function activitySection(d: Dossier, client: ApiClient, rerender: Rerender): HTMLElement {
  const years = [...new Set(d.activities.map((a) => a.academic_year))].sort();
  const groups = years.map((year) =>
    el(
      "div",
      { class: "activity-year" },
      el("h4", {}, year),
      table(
        [TEXT.colKind, TEXT.colDescription, TEXT.colDetail],
        d.activities
          .filter((a) => a.academic_year === year)
          .map((a) => [kindLabel(a.kind), a.description, a.detail ?? ""]),
      ),
    ),
  );
  const year = el("input", { placeholder: TEXT.yearHint, required: true });
  const kind = selectControl(ACTIVITY_KIND_VALUES, kindLabel);
  const description = el("input", { required: true });
  const detail = el("input", {});
  return el(
    "section",
    { class: "activities" },
    el("h3", {}, TEXT.activities),
    ...groups,
    actionForm(
      TEXT.addActivity,
      [
        labelled(TEXT.academicYear, year),
        labelled(TEXT.colKind, kind),
        labelled(TEXT.colDescription, description),
        labelled(TEXT.colDetail, detail),
      ],
      TEXT.submit,
      () =>
        client.addActivity(d.id, {
          academic_year: year.value,
          kind: kind.value,
          description: description.value,
          detail: detail.value.trim() || null,
        }),
      rerender,
      () => (isAcademicYearLabel(year.value) ? null : TEXT.yearHint),
    ),
  );
}

function documentSection(d: Dossier, client: ApiClient, rerender: Rerender): HTMLElement {
  const kind = el("input", { required: true });
  const date = el("input", { type: "date", required: true });
  const note = el("input", {});
  return el(
    "section",
    { class: "documents" },
    el("h3", {}, TEXT.documents),
    table(
      [TEXT.documentKind, TEXT.colDate, TEXT.note],
      d.documents.map((x) => [x.kind, x.date, x.note ?? ""]),
    ),
    actionForm(
      TEXT.addDocument,
      [labelled(TEXT.documentKind, kind), labelled(TEXT.colDate, date), labelled(TEXT.note, note)],
      TEXT.submit,
      () => client.addDocument(d.id, { kind: kind.value, date: date.value, note: note.value.trim() || null }),
      rerender,
    ),
  );
}

function lifecycleSection(d: Dossier, client: ApiClient, rerender: Rerender): HTMLElement {
  const form = selectControl(FORM_VALUES, formLabel);
  const enrolledOn = el("input", { type: "date", required: true });
  const term = el("input", { type: "number", value: "36", required: true });
  const basis = el("input", { required: true });
  const topic = el("input", { required: true });
  const enrollForm = actionForm(
    TEXT.enroll,
    [
      labelled(TEXT.filterForm, form),
      labelled(TEXT.enrollmentDate, enrolledOn),
      labelled(TEXT.termMonths, term),
      labelled(TEXT.basis, basis),
      labelled(TEXT.initialTopic, topic),
    ],
    TEXT.enroll,
    () =>
      client.enroll(d.id, {
        form: form.value,
        enrollment_date: enrolledOn.value,
        term_months: Number(term.value),
        basis: basis.value,
        initial_topic_title: topic.value,
      }),
    rerender,
  );

  const dismissDate = el("input", { type: "date", required: true });
  const right = el("input", { type: "checkbox", checked: true });
  const dismissNote = el("input", {});
  const dismissForm = actionForm(
    TEXT.dismiss,
    [
      labelled(TEXT.dismissalDate, dismissDate),
      labelled(TEXT.rightOfDefense, right),
      labelled(TEXT.note, dismissNote),
    ],
    TEXT.dismiss,
    () =>
      client.dismiss(d.id, {
        date: dismissDate.value,
        right_of_defense: right.checked,
        note: dismissNote.value.trim() || null,
      }),
    rerender,
  );

  const defenseDate = el("input", { type: "date", required: true });
  const outcome = selectControl(OUTCOME_VALUES, outcomeLabel);
  const defenseForm = actionForm(
    TEXT.recordDefense,
    [labelled(TEXT.defenseDate, defenseDate), labelled(TEXT.outcome, outcome)],
    TEXT.recordDefense,
    () => client.recordDefense(d.id, { date: defenseDate.value, outcome: outcome.value }),
    rerender,
  );

  const newTitle = el("input", { required: true });
  const effective = el("input", { type: "date", required: true });
  const topicForm = actionForm(
    TEXT.changeTopic,
    [labelled(TEXT.newTitle, newTitle), labelled(TEXT.effectiveDate, effective)],
    TEXT.submit,
    () => client.changeTopic(d.id, { new_title: newTitle.value, effective_date: effective.value }),
    rerender,
  );

  return el(
    "section",
    { class: "lifecycle-forms" },
    enrollForm,
    dismissForm,
    defenseForm,
    topicForm,
  );
}

export async function dossierDetailScreen(
  root: HTMLElement,
  client: ApiClient,
  id: string,
  goBack: () => void,
): Promise<void> {
  clear(root);
  let dossier: Dossier;
  let supervisors: Supervisor[];
  try {
    [dossier, supervisors] = await Promise.all([client.getDossier(id), client.listSupervisors()]);
  } catch (error) {
    const text =
      error instanceof ApiError ? explainError(error.code, error.message) : TEXT.apiDown;
    root.append(errorBanner(text));
    return;
  }

  const render = (d: Dossier) => {
    clear(root);
    root.append(
      el("a", { href: "#/dossiers", class: "back-link", onclick: (() => goBack()) as EventListener }, TEXT.back),
      el("h2", {}, `${TEXT.dossierTitle}: ${d.family_name} ${d.given_name}`),
      identitySection(d),
      topicSection(d),
      lifecycleSection(d, client, render),
      supervisionSection(d, supervisors, client, render),
      examSection(d, client, render),
      activitySection(d, client, render),
      documentSection(d, client, render),
    );
  };
  render(dossier);
}
