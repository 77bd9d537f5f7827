/** Single-page bootstrap: annotator identity from the URL, two tabs. */

import { AnnotateScreen } from "./annotate.js";
import { ApiClient } from "./api.js";
import { ClassifyScreen } from "./classify.js";

function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const annotator = params.get("annotator") ?? "anonymous";
  const api = new ApiClient("", annotator);

  const annotateRoot = document.querySelector<HTMLElement>("#annotate")!;
  const classifyRoot = document.querySelector<HTMLElement>("#classify")!;
  const annotate = new AnnotateScreen(annotateRoot, api, annotator);
  const classify = new ClassifyScreen(classifyRoot, api);

  const tabs = document.querySelectorAll<HTMLButtonElement>(".tab");
  tabs.forEach((tab) => {
    tab.onclick = () => {
      tabs.forEach((other) => other.classList.remove("active"));
      tab.classList.add("active");
      const showAnnotate = tab.dataset.target === "annotate";
      annotateRoot.hidden = !showAnnotate;
      classifyRoot.hidden = showAnnotate;
    };
  });

  document.addEventListener("keydown", (event) => {
    if (!annotateRoot.hidden &&
        !(event.target instanceof HTMLInputElement) &&
        !(event.target instanceof HTMLTextAreaElement)) {
      annotate.handleKey(event);
    }
  });

  classify.render();
  void annotate.start();
}

document.addEventListener("DOMContentLoaded", boot);
