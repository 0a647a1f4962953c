// Review the prescriptive-versus-performed delta and submit refinement
// decisions. Threshold-suggested additions arrive pre-highlighted straight
// from the server payload; minimal-requirement removals route through the
// approval modal when the server demands it.

import { ApiClient } from "./api.js";
import { openApprovalModal } from "./approvalModal.js";
import { ViewModel } from "./state.js";
import { DeltaPayload, RefinementDecision, ServiceError } from "./types.js";

export interface DeltaReviewOptions {
  modalHost?: HTMLElement;
  onError?: (message: string) => void;
  onApplied?: (delta: DeltaPayload) => void;
}

function entryRow(key: string, kind: "extra" | "missing", suggested: boolean, support: string): string {
  return `
    <li class="delta-entry${suggested ? " suggested" : ""}" data-key="${key}" data-kind="${kind}">
      <label>
        <input type="checkbox" data-testid="decide-${key}" ${suggested ? "checked" : ""} />
        ${kind === "extra" ? "add" : "remove"} ${key}${support}
      </label>
    </li>`;
}

export class DeltaReview {
  constructor(
    readonly container: HTMLElement,
    readonly model: ViewModel,
    readonly api: ApiClient,
    readonly options: DeltaReviewOptions = {},
  ) {}

  get modalHost(): HTMLElement {
    return this.options.modalHost ?? document.body;
  }

  render(): void {
    const delta = this.model.delta;
    this.container.innerHTML = "";
    if (!delta) {
      this.container.textContent = "No delta computed yet.";
      return;
    }

    if (
      delta.missing_objects.length === 0 &&
      delta.extra_objects.length === 0 &&
      delta.missing_edges.length === 0 &&
      delta.extra_edges.length === 0 &&
      delta.relation_conflicts.length === 0
    ) {
      const empty = document.createElement("p");
      empty.dataset.testid = "no-discrepancies";
      empty.className = "empty-delta";
      empty.textContent = "No discrepancies: the performed process matches the prescriptive one.";
      this.container.appendChild(empty);
      return;
    }

    const suggestions = new Set(delta.suggestions ?? []);
    const rows: string[] = [];
    for (const key of delta.extra_objects) {
      const name = key.split(":", 2)[1] ?? key;
      const count = Object.entries(delta.frequency).find(
        ([activity]) => activity.trim().replace(/\s+/g, " ").toLowerCase() === name,
      )?.[1];
      const support = count !== undefined ? ` (${count}/${delta.case_count} cases)` : "";
      rows.push(entryRow(key, "extra", suggestions.has(key), support));
    }
    for (const key of delta.missing_objects) {
      rows.push(entryRow(key, "missing", false, ""));
    }

    this.container.innerHTML = `
      <h2>Delta review</h2>
      <ul class="delta-list">${rows.join("")}</ul>
      <ul class="conflict-list">
        ${delta.relation_conflicts
          .map(
            (c) =>
              `<li class="relation-conflict">${c.a} / ${c.b}: prescribed ${c.prescriptive}, performed ${c.performed}</li>`,
          )
          .join("")}
      </ul>
      <button data-testid="submit-decisions">Apply decisions</button>`;

    (this.container.querySelector("[data-testid=submit-decisions]") as HTMLButtonElement).addEventListener(
      "click",
      () => void this.submit(),
    );
  }

  collectDecisions(): RefinementDecision[] {
    const decisions: RefinementDecision[] = [];
    for (const entry of this.container.querySelectorAll<HTMLElement>(".delta-entry")) {
      const checkbox = entry.querySelector("input") as HTMLInputElement;
      if (!checkbox.checked) continue;
      const key = entry.dataset.key as string;
      decisions.push({
        target: key,
        action: entry.dataset.kind === "extra" ? "add" : "remove",
      });
    }
    return decisions;
  }

  async submit(decisions?: RefinementDecision[]): Promise<void> {
    const toSend = decisions ?? this.collectDecisions();
    try {
      const result = await this.api.submitDecisions(toSend);
      this.model.applyDelta(result.delta);
      this.render();
      this.options.onApplied?.(result.delta);
    } catch (error) {
      if (error instanceof ServiceError && error.code === "approval-required") {
        // route the removal the server objected to through the modal; the
        // rejection message names the guarded target
        const unapproved = toSend.filter((d) => d.action === "remove" && !d.approval);
        const offender =
          unapproved.find((d) => error.message.includes(String(d.target))) ?? unapproved[0];
        if (!offender) {
          this.options.onError?.(error.message);
          return;
        }
        const handle = openApprovalModal(this.modalHost, `Removing ${offender.target} needs approval.`, error.message);
        const approval = await handle.result;
        if (approval === null) return;
        const amended = toSend.map((d) => (d === offender ? { ...d, approval } : d));
        await this.submit(amended);
        return;
      }
      this.options.onError?.(String((error as Error).message ?? error));
    }
  }
}
