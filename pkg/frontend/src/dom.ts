import {
  ANSWER_OPTIONS,
  CONFIDENCE_CHOICES,
  CONFIDENCE_PROMPT,
  EXAMPLE_PAIRS,
  HIGHER_LABEL,
  INSTRUCTIONS_PARAGRAPHS,
  INSTRUCTIONS_TITLE,
  LOWER_LABEL,
} from "./content";
import { FlowError, SessionFlow, type FlowState } from "./flow";
import type { Answer, QuestionnaireField } from "./types";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function answerLabel(answer: Answer): string {
  const option = ANSWER_OPTIONS.find((o) => o.value === answer);
  return option ? option.label : answer;
}

/** Redraw the whole app into `root` from the flow's current state. */
export function render(root: HTMLElement, flow: SessionFlow): void {
  root.innerHTML = viewHtml(flow.state);
  wire(root, flow);
}

function viewHtml(state: FlowState): string {
  const error = state.error
    ? `<div class="error" role="alert">${esc(state.error)}</div>`
    : "";
  return `<div class="stage">${error}${phaseHtml(state)}</div>`;
}

function phaseHtml(state: FlowState): string {
  switch (state.phase) {
    case "idle":
      return `<p class="muted">Connecting to the study&hellip;</p>`;
    case "instructions":
      return instructionsHtml(state);
    case "trial":
    case "confidence":
      return trialHtml(state);
    case "feedback":
      return feedbackHtml(state);
    case "break":
      return breakHtml();
    case "gate-failed":
      return gateFailedHtml(state);
    case "questionnaire":
      return questionnaireHtml(state);
    case "complete":
      return completeHtml(state);
  }
}

function instructionsHtml(state: FlowState): string {
  const paragraphs = INSTRUCTIONS_PARAGRAPHS.map(
    (p) => `<p>${esc(p)}</p>`,
  ).join("");
  const examples = EXAMPLE_PAIRS.map(
    (pair) => `
    <figure class="example">
      <figcaption><strong>${esc(pair.title)}</strong></figcaption>
      <div class="example-row">
        <div class="example-cell">${pair.lowerSvg}
          <div class="tag tag-lower">${esc(LOWER_LABEL)}</div>
        </div>
        <div class="example-cell">${pair.higherSvg}
          <div class="tag tag-higher">${esc(HIGHER_LABEL)}</div>
        </div>
      </div>
      <p class="muted">${esc(pair.note)}</p>
    </figure>`,
  ).join("");
  const button =
    state.instructionsReturn === null
      ? `<button data-action="begin">I understand, begin</button>`
      : `<button data-action="close-instructions">Back to the trial</button>`;
  return `
    <h1>${esc(INSTRUCTIONS_TITLE)}</h1>
    ${paragraphs}
    <div class="examples">${examples}</div>
    <div class="actions">${button}</div>`;
}

function trialHtml(state: FlowState): string {
  const trial = state.trial!;
  const p = trial.payload;
  const kindTag =
    p.trial_kind === "training" ? `<span class="tag">practice</span>` : "";
  const review =
    p.trial_kind === "training"
      ? `<button class="link" data-action="reopen-instructions">Review the instructions</button>`
      : "";
  const prompt =
    state.phase === "trial"
      ? `<div class="prompt">Which drawing has lower stress?</div>
         <div class="actions">${ANSWER_OPTIONS.map(
           (o) =>
             `<button data-answer="${o.value}">${esc(o.label)}</button>`,
         ).join("")}</div>`
      : `<div class="prompt">You chose: <strong>${esc(
          answerLabel(trial.chosen!),
        )}</strong></div>
         <div class="prompt">${esc(CONFIDENCE_PROMPT)}</div>
         <div class="actions">${CONFIDENCE_CHOICES.map(
           (c) =>
             `<button data-confident="${c.value}">${esc(c.label)}</button>`,
         ).join("")}</div>`;
  return `
    <div class="progress">Trial ${p.number} of ${p.total} ${kindTag}</div>
    <div class="stimuli">
      <div class="pane" data-side="left">${trial.leftSvg}</div>
      <div class="pane" data-side="right">${trial.rightSvg}</div>
    </div>
    ${prompt}
    <div class="footer">${review}</div>`;
}

function feedbackHtml(state: FlowState): string {
  const feedback = state.feedback!;
  const verdict = feedback.correct
    ? `<div class="banner banner-good">Correct!</div>`
    : `<div class="banner banner-bad">Not quite. The better answer was:
       <strong>${esc(answerLabel(feedback.correct_answer))}</strong></div>`;
  const gateLine =
    state.gate && state.gate.passed
      ? `<p>Practice complete: ${state.gate.correct} of ${state.gate.total} correct.</p>`
      : "";
  return `
    ${verdict}
    ${gateLine}
    <div class="actions"><button data-action="feedback-continue">Continue</button></div>`;
}

function breakHtml(): string {
  return `
    <h2>Block complete</h2>
    <p>The next drawings are a different size. Take a short break and
    continue when you are ready.</p>
    <div class="actions"><button data-action="break-continue">Continue</button></div>`;
}

function gateFailedHtml(state: FlowState): string {
  const gate = state.gate;
  const score = gate
    ? `<p>You answered ${gate.correct} of ${gate.total} practice trials
       correctly, below the score needed to continue to the main block.</p>`
    : "";
  return `
    <h2>Thank you</h2>
    ${score}
    <p>The session ends here. You may close this window.</p>`;
}

function questionnaireHtml(state: FlowState): string {
  const fields = state.questionnaire!.fields.map(fieldHtml).join("");
  return `
    <h2>Almost done</h2>
    <p>A few final questions about the experiment.</p>
    <form data-form="questionnaire">
      ${fields}
      <div class="actions"><button type="submit">Submit</button></div>
    </form>`;
}

function fieldHtml(field: QuestionnaireField): string {
  const prompt = `<div class="prompt">${esc(field.prompt)}</div>`;
  if (field.type === "choice" && field.options) {
    const radios = field.options
      .map(
        (option) => `
        <label class="choice">
          <input type="radio" name="${esc(field.name)}" value="${esc(option)}">
          ${esc(option)}
        </label>`,
      )
      .join("");
    return `<fieldset data-field="${esc(field.name)}">${prompt}${radios}</fieldset>`;
  }
  const input =
    field.name === "strategy"
      ? `<textarea name="${esc(field.name)}" rows="4"></textarea>`
      : `<input type="text" name="${esc(field.name)}">`;
  return `<fieldset data-field="${esc(field.name)}">${prompt}${input}</fieldset>`;
}

function completeHtml(state: FlowState): string {
  const answered = state.summary ? state.summary.trials_answered : 0;
  return `
    <h2>All done</h2>
    <p>You answered ${answered} trials. Thank you for taking part.
    You may close this window.</p>`;
}

function act(
  root: HTMLElement,
  flow: SessionFlow,
  work: () => void | Promise<unknown>,
): void {
  flow.state.error = null;
  Promise.resolve()
    .then(work)
    .catch((err) => {
      // A second click while a submission is in flight is dropped silently.
      if (err instanceof FlowError && err.message.includes("in flight")) return;
      flow.state.error = err instanceof Error ? err.message : String(err);
      render(root, flow);
    });
}

function wire(root: HTMLElement, flow: SessionFlow): void {
  const on = (selector: string, handler: (el: HTMLElement) => void): void => {
    root.querySelectorAll<HTMLElement>(selector).forEach((el) => {
      el.addEventListener("click", (event) => {
        event.preventDefault();
        handler(el);
      });
    });
  };
  on(`[data-action="begin"]`, () =>
    act(root, flow, () => flow.acknowledgeInstructions()),
  );
  on(`[data-action="close-instructions"]`, () =>
    act(root, flow, () => flow.closeInstructions()),
  );
  on(`[data-action="reopen-instructions"]`, () =>
    act(root, flow, () => flow.reopenInstructions()),
  );
  on(`[data-answer]`, (el) =>
    act(root, flow, () => flow.choose(el.dataset.answer as Answer)),
  );
  on(`[data-confident]`, (el) =>
    act(root, flow, () => flow.submitConfidence(el.dataset.confident === "true")),
  );
  on(`[data-action="feedback-continue"]`, () =>
    act(root, flow, () => flow.acknowledgeFeedback()),
  );
  on(`[data-action="break-continue"]`, () =>
    act(root, flow, () => flow.continueFromBreak()),
  );
  const form = root.querySelector<HTMLFormElement>(`form[data-form="questionnaire"]`);
  if (form) {
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const answers: Record<string, string> = {};
      for (const field of flow.state.questionnaire?.fields ?? []) {
        answers[field.name] = String(data.get(field.name) ?? "");
      }
      act(root, flow, () => flow.submitQuestionnaire(answers));
    });
  }
}
