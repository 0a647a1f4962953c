// Single-page shell: variant browser, tailoring workspace, delta review.
// State lives in the ViewModel and changes only through service responses.

import { ApiClient } from "./api.js";
import { DeltaReview } from "./deltaReview.js";
import { ViewModel } from "./state.js";
import { TailoringWorkspace } from "./tailoringWorkspace.js";
import { loadCutWithDiffs, renderVariantBrowser } from "./variantBrowser.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8640";

const api = new ApiClient(SERVICE_URL);
const model = new ViewModel();

function banner(message: string): void {
  const element = document.querySelector("#error-banner") as HTMLElement;
  element.textContent = message;
  element.hidden = message === "";
  // errors never block the page; state stays as it was
}

async function boot(): Promise<void> {
  const app = document.querySelector("#app") as HTMLElement;
  app.innerHTML = `
    <p id="error-banner" class="error-banner" hidden></p>
    <nav>
      <label>Abstraction level <input id="level" type="number" min="1" value="2" /></label>
      <button id="load-cut">Load cut</button>
    </nav>
    <main>
      <section id="variant-browser"></section>
      <section id="workspace"></section>
      <section id="delta-review"></section>
    </main>`;

  const browser = document.querySelector("#variant-browser") as HTMLElement;
  const workspace = new TailoringWorkspace(
    document.querySelector("#workspace") as HTMLElement,
    model,
    api,
    { onError: banner },
  );
  const review = new DeltaReview(
    document.querySelector("#delta-review") as HTMLElement,
    model,
    api,
    { onError: banner },
  );

  (document.querySelector("#load-cut") as HTMLButtonElement).addEventListener("click", () => {
    const level = Number((document.querySelector("#level") as HTMLInputElement).value);
    loadCutWithDiffs(model, api, level)
      .then(() => {
        banner("");
        renderVariantBrowser(browser, model, api, banner);
      })
      .catch((error) => banner(String(error.message ?? error)));
  });

  workspace.render();
  review.render();
}

void boot();
