// Client-side view model. Holds exactly what the service sent plus the
// selection cursor and the queue of actions waiting for an approval; it is
// mutated only from service responses.

import { CutPayload, DeltaPayload, SessionView } from "./types.js";

export interface PendingApproval {
  description: string;
  serverMessage?: string;
  submit: (approver: string, justification: string) => Promise<void>;
}

export class ViewModel {
  cut: CutPayload | null = null;
  diffs = new Map<string, DeltaPayload>();
  selectedVariantId: string | null = null;
  session: SessionView | null = null;
  delta: DeltaPayload | null = null;
  pendingApprovals: PendingApproval[] = [];

  applyCut(cut: CutPayload): void {
    this.cut = cut;
  }

  applyDiff(variantId: string, diff: DeltaPayload): void {
    this.diffs.set(variantId, diff);
  }

  applySelection(variantId: string): void {
    this.selectedVariantId = variantId;
  }

  applySession(view: SessionView): void {
    this.session = view;
  }

  applyDelta(delta: DeltaPayload): void {
    this.delta = delta;
  }

  enqueueApproval(pending: PendingApproval): void {
    this.pendingApprovals.push(pending);
  }

  dequeueApproval(pending: PendingApproval): void {
    this.pendingApprovals = this.pendingApprovals.filter((p) => p !== pending);
  }

  get approvalPending(): boolean {
    return this.pendingApprovals.length > 0;
  }
}
