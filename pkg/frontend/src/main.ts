import { ApiClient } from "./api.js";
import { StudySession, summaryConsistent } from "./state.js";
import { renderError, renderSummary, renderTask } from "./view.js";

async function showCurrent(root: HTMLElement, session: StudySession): Promise<void> {
  if (session.isFinished()) {
    const summary = await session.summary();
    if (!summaryConsistent(session.snapshot, summary)) {
      console.warn("server summary disagrees with local answers", summary);
    }
    renderSummary(root, summary);
    session.clearStored();
    return;
  }
  const group = await session.loadCurrentGroup();
  renderTask(root, session.progress(), group, {
    onSubmit: (optionIndex) => {
      void session
        .submit(optionIndex)
        .then(() => showCurrent(root, session))
        .catch((err) => {
          renderError(root, `Submission failed: ${String(err)}`, () =>
            void showCurrent(root, session),
          );
        });
    },
  });
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app container");
  }
  const session = new StudySession(new ApiClient(""), window.localStorage);
  try {
    await session.start();
    await showCurrent(root, session);
  } catch (err) {
    renderError(root, `Could not reach the study service: ${String(err)}`, () =>
      void boot(),
    );
  }
}

window.addEventListener("DOMContentLoaded", () => void boot());
