/** DOM rendering: the rating-table task card and the final summary card. */
import { GroupView, Summary } from "./api.js";

export interface TaskCallbacks {
  onSubmit: (optionIndex: number) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function formatRating(value: number | null): string {
  if (value === null) {
    return "–";
  }
  return Number.isInteger(value) ? String(value) : value.toFixed(1);
}

/**
 * One task: the member-by-option rating table with a radio per option
 * column. The submit button stays disabled until an option is picked;
 * radios are natively keyboard-operable.
 */
export function renderTask(
  root: HTMLElement,
  progress: string,
  group: GroupView,
  callbacks: TaskCallbacks,
): void {
  root.replaceChildren();
  const card = el("div", "card");
  card.appendChild(el("p", "progress", `Group ${progress}`));
  card.appendChild(
    el(
      "p",
      "prompt",
      "Consider the group members' ratings and select the option you " +
        "believe was the group's final choice.",
    ),
  );

  const table = el("table", "ratings");
  const head = el("tr");
  head.appendChild(el("th", undefined, ""));
  for (const option of group.options) {
    head.appendChild(el("th", undefined, option));
  }
  table.appendChild(head);
  for (const member of group.members) {
    const row = el("tr");
    row.appendChild(el("th", undefined, member.label));
    for (const rating of member.ratings) {
      row.appendChild(el("td", undefined, formatRating(rating)));
    }
    table.appendChild(row);
  }

  const submit = el("button", "submit", "Submit prediction") as HTMLButtonElement;
  submit.disabled = true;

  const pickRow = el("tr", "pick-row");
  pickRow.appendChild(el("th", undefined, "Your prediction"));
  group.options.forEach((option, index) => {
    const cell = el("td");
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "prediction";
    radio.value = String(index);
    radio.setAttribute("aria-label", option);
    radio.addEventListener("change", () => {
      submit.disabled = false;
    });
    cell.appendChild(radio);
    pickRow.appendChild(cell);
  });
  table.appendChild(pickRow);
  card.appendChild(table);

  submit.addEventListener("click", () => {
    const picked = root.querySelector<HTMLInputElement>(
      'input[name="prediction"]:checked',
    );
    if (picked) {
      callbacks.onSubmit(Number(picked.value));
    }
  });
  card.appendChild(submit);
  root.appendChild(card);
}

function referenceLine(label: string, value: number | null): HTMLElement {
  const shown = value === null ? "not available" : value.toFixed(2);
  return el("li", "reference", `${label}: ${shown}`);
}

export function renderSummary(root: HTMLElement, summary: Summary): void {
  root.replaceChildren();
  const card = el("div", "card summary");
  card.appendChild(el("h2", undefined, "Session complete"));
  card.appendChild(
    el(
      "p",
      "score",
      `You predicted ${summary.correct} of ${summary.answered} group choices ` +
        `correctly (accuracy ${summary.accuracy.toFixed(2)}).`,
    ),
  );
  const minutes = summary.elapsed_seconds / 60;
  card.appendChild(el("p", "elapsed", `Elapsed time: ${minutes.toFixed(1)} minutes.`));
  card.appendChild(el("h3", undefined, "Reference accuracies"));
  const list = el("ul");
  list.appendChild(referenceLine("Learned predictor (LCP-AVE)", summary.reference.lcp_ave));
  list.appendChild(
    referenceLine("Aggregation baseline (PACP-AVE)", summary.reference.pacp_ave),
  );
  list.appendChild(
    referenceLine("Human participants, study mean", summary.reference.human_paper_mean),
  );
  card.appendChild(list);
  root.appendChild(card);
}

export function renderError(root: HTMLElement, message: string, onRetry: () => void): void {
  root.replaceChildren();
  const card = el("div", "card error");
  card.appendChild(el("p", undefined, message));
  const retry = el("button", "retry", "Retry") as HTMLButtonElement;
  retry.addEventListener("click", onRetry);
  card.appendChild(retry);
  root.appendChild(card);
}
