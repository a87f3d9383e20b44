// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { GroupView, Summary } from "../src/api.js";
import { renderError, renderSummary, renderTask } from "../src/view.js";

const GROUP: GroupView = {
  options: ["D1", "D2", "D3"],
  members: [
    { label: "Member 1", ratings: [9, 2.5, null] },
    { label: "Member 2", ratings: [4, 8, 1] },
  ],
};

const SUMMARY: Summary = {
  answered: 3,
  correct: 2,
  accuracy: 2 / 3,
  elapsed_seconds: 95,
  reference: { lcp_ave: 0.5, pacp_ave: 0.44, human_paper_mean: 0.37 },
};

function root(): HTMLElement {
  const node = document.createElement("main");
  document.body.replaceChildren(node);
  return node;
}

describe("task view", () => {
  it("shows the rating table with anonymized option headers", () => {
    const node = root();
    renderTask(node, "1 / 3", GROUP, { onSubmit: () => undefined });
    const headers = [...node.querySelectorAll("th")].map((th) => th.textContent);
    expect(headers).toContain("D1");
    expect(headers).toContain("Member 2");
    expect(node.textContent).toContain("Group 1 / 3");
    expect(node.textContent).toContain("2.5");
    expect(node.textContent).toContain("–");
  });

  it("disables submit until an option is selected", () => {
    const node = root();
    let submitted: number | null = null;
    renderTask(node, "1 / 3", GROUP, { onSubmit: (index) => (submitted = index) });
    const submit = node.querySelector<HTMLButtonElement>("button.submit")!;
    expect(submit.disabled).toBe(true);
    submit.click();
    expect(submitted).toBeNull();

    const radios = node.querySelectorAll<HTMLInputElement>('input[type="radio"]');
    expect(radios).toHaveLength(3);
    radios[1]!.checked = true;
    radios[1]!.dispatchEvent(new Event("change"));
    expect(submit.disabled).toBe(false);
    submit.click();
    expect(submitted).toBe(1);
  });

  it("allows exactly one selection (shared radio group)", () => {
    const node = root();
    renderTask(node, "2 / 3", GROUP, { onSubmit: () => undefined });
    const radios = node.querySelectorAll<HTMLInputElement>('input[type="radio"]');
    const names = new Set([...radios].map((radio) => radio.name));
    expect(names.size).toBe(1);
  });

  it("never mentions the actual group choice", () => {
    const node = root();
    renderTask(node, "1 / 3", GROUP, { onSubmit: () => undefined });
    expect(node.textContent).not.toMatch(/actual|correct answer|choice was/i);
  });
});

describe("summary view", () => {
  it("shows accuracy and the study-mean reference line", () => {
    const node = root();
    renderSummary(node, SUMMARY);
    expect(node.textContent).toContain("2 of 3");
    expect(node.textContent).toContain("0.67");
    expect(node.textContent).toContain("0.37");
    expect(node.textContent).toContain("Human participants");
    expect(node.textContent).toContain("1.6 minutes");
  });

  it("marks missing references as unavailable", () => {
    const node = root();
    renderSummary(node, {
      ...SUMMARY,
      reference: { lcp_ave: null, pacp_ave: null, human_paper_mean: 0.37 },
    });
    expect(node.textContent).toContain("not available");
  });
});

describe("error view", () => {
  it("offers a retry action", () => {
    const node = root();
    let retried = false;
    renderError(node, "network down", () => (retried = true));
    expect(node.textContent).toContain("network down");
    node.querySelector<HTMLButtonElement>("button.retry")!.click();
    expect(retried).toBe(true);
  });
});
