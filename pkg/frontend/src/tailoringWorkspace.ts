// The interactive tailoring panel. Removing a minimal-requirement object
// opens the approval modal before anything is sent; if the server still
// rejects (e.g. the modal was bypassed), the rejection reopens the modal
// with the server's message. Submitted actions appear in the transcript
// view in order.

import { ApiClient } from "./api.js";
import { openApprovalModal } from "./approvalModal.js";
import { ViewModel } from "./state.js";
import { Approval, ServiceError, SessionView } from "./types.js";

export interface WorkspaceOptions {
  modalHost?: HTMLElement;
  onError?: (message: string) => void;
}

async function submitRemoval(
  workspace: TailoringWorkspace,
  key: string,
  approval: Approval | null,
): Promise<void> {
  const session = workspace.model.session;
  if (!session) return;
  const action: Record<string, unknown> = { type: "remove-object", key };
  if (approval) action.approval = approval;
  try {
    const view = await workspace.api.sessionAction(session.id, "tailor", { action });
    workspace.model.applySession(view);
    workspace.render();
  } catch (error) {
    if (error instanceof ServiceError && error.code === "approval-required") {
      // the server refused: reopen the modal carrying its message
      workspace.requestApproval(key, error.message);
      return;
    }
    workspace.options.onError?.(String((error as Error).message ?? error));
  }
}

export class TailoringWorkspace {
  constructor(
    readonly container: HTMLElement,
    readonly model: ViewModel,
    readonly api: ApiClient,
    readonly options: WorkspaceOptions = {},
  ) {}

  get modalHost(): HTMLElement {
    return this.options.modalHost ?? document.body;
  }

  requestApproval(key: string, serverMessage?: string): void {
    const handle = openApprovalModal(
      this.modalHost,
      `Removing ${key} requires project-manager approval.`,
      serverMessage,
    );
    void handle.result.then((approval) => {
      if (approval) return submitRemoval(this, key, approval);
      return undefined;
    });
  }

  removeObject(key: string, priority: string): void {
    if (priority === "minimal-requirement") {
      this.requestApproval(key);
      return;
    }
    void submitRemoval(this, key, null);
  }

  render(): void {
    const session = this.model.session;
    this.container.innerHTML = "";
    if (!session || !session.working_model) {
      this.container.textContent = "No working model: select a variant first.";
      return;
    }

    const heading = document.createElement("h2");
    heading.textContent = `Tailoring ${session.working_model.id} (phase: ${session.phase})`;
    this.container.appendChild(heading);

    const list = document.createElement("ul");
    list.className = "object-list";
    for (const obj of session.working_model.objects) {
      const key = obj.key ?? `${obj.kind}:${obj.name.trim().replace(/\s+/g, " ").toLowerCase()}`;
      const item = document.createElement("li");
      item.dataset.key = key;
      item.dataset.priority = obj.priority;
      item.innerHTML = `
        <span class="object-label">${obj.kind} ${obj.name} [${obj.priority}]</span>
        <button data-testid="remove-${key}">remove</button>`;
      (item.querySelector("button") as HTMLButtonElement).addEventListener("click", () =>
        this.removeObject(key, obj.priority),
      );
      list.appendChild(item);
    }
    this.container.appendChild(list);

    const transcript = document.createElement("ol");
    transcript.className = "transcript";
    transcript.dataset.testid = "transcript";
    for (const entry of session.transcript) {
      const item = document.createElement("li");
      item.textContent = `${entry.type} @ ${entry.at}`;
      transcript.appendChild(item);
    }
    this.container.appendChild(transcript);

    const ledger = document.createElement("ul");
    ledger.className = "ledger";
    ledger.dataset.testid = "ledger";
    for (const entry of session.ledger) {
      const item = document.createElement("li");
      item.textContent = `${entry.actor} ${entry.action} ${entry.target}: ${entry.justification}`;
      ledger.appendChild(item);
    }
    this.container.appendChild(ledger);
  }

  applyView(view: SessionView): void {
    this.model.applySession(view);
    this.render();
  }
}
