// Browse the members of a cut with their differences against the core.
// Every marker comes verbatim from the /line/diff payload: extras render as
// additions, missing as removals; the client re-diffs nothing.

import { ApiClient } from "./api.js";
import { ViewModel } from "./state.js";
import { CutPayload, DeltaPayload } from "./types.js";

function markerList(keys: string[], marker: "addition" | "removal"): string {
  return keys
    .map(
      (key) =>
        `<li class="marker-${marker}" data-testid="diff-${marker}" data-key="${key}">` +
        `${marker === "addition" ? "+" : "-"} ${key}</li>`,
    )
    .join("");
}

export function renderVariantBrowser(
  container: HTMLElement,
  model: ViewModel,
  api: ApiClient,
  onError: (message: string) => void = () => {},
): void {
  const cut = model.cut;
  container.innerHTML = "";
  if (!cut) {
    container.textContent = "No cut loaded yet.";
    return;
  }

  const heading = document.createElement("h2");
  heading.textContent = `Variants at abstraction level ${cut.selected_level}`;
  container.appendChild(heading);

  for (const variantId of cut.members) {
    const diff = model.diffs.get(variantId);
    const card = document.createElement("section");
    card.className = "variant-card";
    card.dataset.variant = variantId;
    if (model.selectedVariantId === variantId) card.classList.add("selected");

    const extras = diff ? diff.extra_objects : [];
    const missing = diff ? diff.missing_objects : [];
    card.innerHTML = `
      <h3>${variantId}${model.selectedVariantId === variantId ? " (selected)" : ""}</h3>
      <ul class="diff-list">
        ${markerList(extras, "addition")}
        ${markerList(missing, "removal")}
        ${extras.length + missing.length === 0 ? `<li class="no-diff" data-testid="no-diff">matches the core</li>` : ""}
      </ul>
      <button data-testid="select-${variantId}">Select ${variantId}</button>`;

    const button = card.querySelector("button") as HTMLButtonElement;
    button.addEventListener("click", () => {
      api
        .selectVariant(variantId)
        .then((response) => {
          model.applySelection(response.selected_variant_id);
          renderVariantBrowser(container, model, api, onError);
        })
        .catch((error) => onError(String(error.message ?? error)));
    });

    container.appendChild(card);
  }
}

export async function loadCutWithDiffs(model: ViewModel, api: ApiClient, level: number): Promise<CutPayload> {
  const cut = await api.lineCut(level);
  model.applyCut(cut);
  for (const member of cut.members) {
    const diff: DeltaPayload = await api.lineDiff(member);
    model.applyDiff(member, diff);
  }
  return cut;
}
