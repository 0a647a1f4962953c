// Contract: the delta review pre-highlights server-computed suggestions,
// routes guarded removals through the approval modal, and renders the empty
// state once the recomputed delta has nothing left.

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DeltaReview } from "../src/deltaReview.js";
import { ViewModel } from "../src/state.js";
import { LiveService, startService, waitFor } from "./helpers.js";

let service: LiveService;
let api: ApiClient;

beforeAll(async () => {
  service = await startService();
  api = new ApiClient(service.url);
});

afterAll(async () => {
  await service.stop();
});

// Two cases follow the prescriptive chain but stop before the system test;
// two more cases perform only the unprescribed panel tuning, putting it
// exactly at the 0.5 suggestion threshold (2 of 4 cases).
const CHAIN = [
  "Requirements specification",
  "Requirements review",
  "Architecture modeling",
  "Statechart modeling",
];

function buildLog(): string {
  const lines: string[] = [];
  let minute = 0;
  const stamp = () => `2004-11-15T09:${String(minute++).padStart(2, "0")}:00Z`;
  for (const caseId of ["c1", "c2"]) {
    for (const activity of CHAIN) {
      lines.push(`${stamp()};${caseId};${activity};completed;dev`);
    }
  }
  for (const caseId of ["c3", "c4"]) {
    lines.push(`${stamp()};${caseId};Panel tuning;completed;dev`);
  }
  return lines.join("\n");
}

async function loadDelta(model: ViewModel): Promise<void> {
  await api.selectVariant("v-standard");
  await api.postLog(buildLog());
  await api.runDiscovery();
  model.applyDelta(await api.computeDelta("v-standard"));
}

describe("delta review", () => {
  it("pre-highlights exactly the server-computed suggestions", async () => {
    const model = new ViewModel();
    await loadDelta(model);
    expect(model.delta?.suggestions).toContain("task:panel tuning");

    const container = document.createElement("div");
    document.body.appendChild(container);
    const review = new DeltaReview(container, model, api);
    review.render();

    const highlighted = new Set(
      Array.from(container.querySelectorAll(".delta-entry.suggested")).map(
        (el) => (el as HTMLElement).dataset.key,
      ),
    );
    expect(highlighted).toEqual(new Set(model.delta?.suggestions));

    // every delta entry is listed, suggested or not
    const listed = new Set(
      Array.from(container.querySelectorAll(".delta-entry")).map((el) => (el as HTMLElement).dataset.key),
    );
    expect(listed).toEqual(
      new Set([...(model.delta?.extra_objects ?? []), ...(model.delta?.missing_objects ?? [])]),
    );
  });

  it("applies accept-all decisions via the modal and renders the empty state", async () => {
    const model = new ViewModel();
    await loadDelta(model);

    const container = document.createElement("div");
    const modalHost = document.createElement("div");
    document.body.appendChild(container);
    document.body.appendChild(modalHost);
    const review = new DeltaReview(container, model, api, { modalHost });
    review.render();

    // accept everything: extras are pre-checked when suggested; check the rest
    for (const entry of container.querySelectorAll<HTMLElement>(".delta-entry")) {
      (entry.querySelector("input") as HTMLInputElement).checked = true;
    }
    (container.querySelector("[data-testid=submit-decisions]") as HTMLButtonElement).click();

    // the system test task is minimal-requirement: the server rejects the bare
    // removal and the modal opens carrying its message
    await waitFor(() => modalHost.querySelector("[data-testid=approval-dialog]") !== null);
    const serverMessage = modalHost.querySelector("[data-testid=server-message]") as HTMLElement;
    expect(serverMessage.textContent).toContain("system test");

    const justification = modalHost.querySelector("[data-testid=justification]") as HTMLTextAreaElement;
    justification.value = "system test happens on the target vehicle";
    justification.dispatchEvent(new Event("input", { bubbles: true }));
    (modalHost.querySelector("form") as HTMLFormElement).dispatchEvent(
      new Event("submit", { bubbles: true, cancelable: true }),
    );

    // once applied, the recomputed delta is empty and the view says so
    await waitFor(() => container.querySelector("[data-testid=no-discrepancies]") !== null, 10000);
    expect(model.delta?.missing_objects).toHaveLength(0);
    expect(model.delta?.extra_objects).toHaveLength(0);
    expect(model.delta?.missing_edges).toHaveLength(0);
    expect(model.delta?.extra_edges).toHaveLength(0);
  });

  it("renders the no-discrepancies state for an empty delta", () => {
    const model = new ViewModel();
    model.applyDelta({
      missing_objects: [],
      extra_objects: [],
      missing_edges: [],
      extra_edges: [],
      relation_conflicts: [],
      frequency: {},
      case_count: 0,
      attribute_overrides: {},
      suggestions: [],
    });
    const container = document.createElement("div");
    document.body.appendChild(container);
    new DeltaReview(container, model, api).render();
    expect(container.querySelector("[data-testid=no-discrepancies]")).not.toBeNull();
  });
});
