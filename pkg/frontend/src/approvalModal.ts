// The approval dialog every guarded removal must pass through. Submit stays
// disabled until a justification is entered; the promise resolves with the
// approval or null when the user cancels. Server rejections reopen the
// modal with the server's message (see openApprovalModal callers).

import { Approval } from "./types.js";

export interface ModalHandle {
  root: HTMLElement;
  result: Promise<Approval | null>;
}

export function openApprovalModal(
  host: HTMLElement,
  description: string,
  serverMessage?: string,
): ModalHandle {
  const root = document.createElement("div");
  root.className = "approval-modal";
  root.innerHTML = `
    <div class="approval-backdrop"></div>
    <form class="approval-dialog" data-testid="approval-dialog">
      <h3>Approval required</h3>
      <p class="approval-description"></p>
      ${serverMessage ? `<p class="approval-server-message" data-testid="server-message"></p>` : ""}
      <label>Approver role
        <input name="approver" data-testid="approver" value="project-manager" />
      </label>
      <label>Justification
        <textarea name="justification" data-testid="justification" rows="3"></textarea>
      </label>
      <div class="approval-buttons">
        <button type="submit" data-testid="approval-submit" disabled>Approve removal</button>
        <button type="button" data-testid="approval-cancel">Cancel</button>
      </div>
    </form>`;

  (root.querySelector(".approval-description") as HTMLElement).textContent = description;
  if (serverMessage) {
    (root.querySelector("[data-testid=server-message]") as HTMLElement).textContent = serverMessage;
  }

  const form = root.querySelector("form") as HTMLFormElement;
  const approver = root.querySelector("[data-testid=approver]") as HTMLInputElement;
  const justification = root.querySelector("[data-testid=justification]") as HTMLTextAreaElement;
  const submit = root.querySelector("[data-testid=approval-submit]") as HTMLButtonElement;
  const cancel = root.querySelector("[data-testid=approval-cancel]") as HTMLButtonElement;

  const refreshSubmit = () => {
    submit.disabled = justification.value.trim() === "" || approver.value.trim() === "";
  };
  justification.addEventListener("input", refreshSubmit);
  approver.addEventListener("input", refreshSubmit);
  refreshSubmit();

  host.appendChild(root);

  const result = new Promise<Approval | null>((resolve) => {
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      if (submit.disabled) return; // never submit without a justification
      root.remove();
      resolve({ approver: approver.value.trim(), justification: justification.value.trim() });
    });
    cancel.addEventListener("click", () => {
      root.remove();
      resolve(null);
    });
  });

  return { root, result };
}
