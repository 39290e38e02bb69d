/** Shared helpers for DOM-driving tests. */

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 5000,
  intervalMs = 20,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
  throw new Error("waitFor: condition not met in time");
}

export function setValue(input: HTMLElement, value: string): void {
  (input as HTMLInputElement).value = value;
}

export function submit(form: HTMLFormElement): void {
  form.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));
}

export function findForm(root: HTMLElement, action: string): HTMLFormElement {
  const form = root.querySelector(`form[data-action="${action}"]`);
  if (!form) throw new Error(`no form for action ${action}`);
  return form as HTMLFormElement;
}

export function labelledControl(form: HTMLFormElement, labelText: string): HTMLInputElement {
  for (const label of Array.from(form.querySelectorAll("label"))) {
    if ((label.firstChild?.textContent ?? "") === labelText) {
      const control = label.querySelector("input, select");
      if (control) return control as HTMLInputElement;
    }
  }
  throw new Error(`no control labelled ${labelText}`);
}
