// The proof workspace application: selection, rule palette, statement
// prompt, hint `?` nodes, info box, phase flow. One mutating request is
// in flight at a time; while waiting, inputs are disabled. All validity
// decisions come from the server.

import { ApiFailure, TutorApi } from "./api";
import type { LayoutMap } from "./layout";
import { renderWorkspace } from "./workspace";
import type { NodeView, SessionView, StepResponse } from "./types";

const POPUP_MS = 2500;

interface PendingPrompt {
  premises: number[];
  rule: string;
  options: string[] | null;
}

export class App {
  view: SessionView | null = null;
  selection = new Set<number>();
  busy = false;
  prompt: PendingPrompt | null = null;
  layouts = new Map<string, LayoutMap>();

  constructor(
    readonly root: HTMLElement,
    readonly api: TutorApi,
  ) {}

  async start(studentId: string, condition?: "NS" | "WP"): Promise<void> {
    this.view = await this.api.createSession(studentId, condition);
    this.render();
  }

  async resume(sid: string): Promise<void> {
    this.view = await this.api.state(sid);
    this.render();
  }

  private layoutFor(view: SessionView): LayoutMap {
    const key = `${view.problem?.id ?? "?"}`;
    let layout = this.layouts.get(key);
    if (!layout) {
      layout = new Map();
      this.layouts.set(key, layout);
    }
    return layout;
  }

  // ---- interactions -------------------------------------------------------

  onNodeClick(node: NodeView): void {
    if (this.busy || this.prompt) return;
    if (this.selection.has(node.id)) {
      this.selection.delete(node.id);
    } else {
      if (!node.justified) return; // `?` nodes cannot justify anything
      if (this.selection.size >= 2) return;
      this.selection.add(node.id);
    }
    this.render();
  }

  async applyRule(rule: string): Promise<void> {
    if (this.busy || this.prompt || !this.view || this.selection.size === 0) return;
    const premises = [...this.selection];
    const out = await this.mutate(() =>
      this.api.step(this.view!.sid, premises, rule),
    );
    if (out) this.handleStep(out, premises, rule);
  }

  async submitPrompt(text: string): Promise<void> {
    if (!this.prompt || !this.view) return;
    const { premises, rule } = this.prompt;
    this.prompt = null;
    const out = await this.mutate(() =>
      this.api.step(this.view!.sid, premises, rule, text),
    );
    if (out) this.handleStep(out, premises, rule);
  }

  cancelPrompt(): void {
    this.prompt = null;
    this.render();
  }

  private handleStep(out: StepResponse, premises: number[], rule: string): void {
    if (out.result === "needs_input") {
      // Several (or unboundedly many) derivations: ask for the statement.
      this.prompt = { premises, rule, options: out.options ?? null };
      this.view = out.state;
      this.render();
      return;
    }
    this.view = out.state;
    this.selection.clear();
    if (out.result === "error") {
      this.render();
      this.showPopup(out.error ?? "invalid step");
      return;
    }
    if (out.result === "redundant") {
      this.render();
      this.showPopup("That statement is already on the screen");
      return;
    }
    this.render();
    if (out.hint) {
      this.note(`The tutor suggests deriving ${out.hint.statement}.`);
    }
    if (out.completed) {
      this.note("Problem complete.");
    }
  }

  async requestHint(): Promise<void> {
    if (!this.view) return;
    try {
      const out = await this.mutate(() => this.api.requestHint(this.view!.sid), true);
      if (out) {
        this.view = out.state;
        this.render();
        this.note(`Try to derive ${out.hint.statement}.`);
      }
    } catch (err) {
      this.render();
      this.showPopup(err instanceof ApiFailure ? err.message : String(err));
    }
  }

  async deleteSelected(): Promise<void> {
    if (!this.view || this.selection.size !== 1) return;
    const [nodeId] = [...this.selection];
    try {
      const out = await this.mutate(() => this.api.deleteNode(this.view!.sid, nodeId), true);
      if (out) {
        this.view = out.state;
        this.selection.clear();
        this.render();
      }
    } catch (err) {
      this.render();
      this.showPopup(err instanceof ApiFailure ? err.message : String(err));
    }
  }

  async deleteHintNode(nodeId: number): Promise<void> {
    if (!this.view) return;
    const out = await this.mutate(() => this.api.deleteNode(this.view!.sid, nodeId), true);
    if (out) {
      this.view = out.state;
      this.render();
    }
  }

  async restart(): Promise<void> {
    if (!this.view) return;
    const out = await this.mutate(() => this.api.restart(this.view!.sid));
    if (out) {
      this.view = out.state;
      this.selection.clear();
      this.render();
    }
  }

  async skip(): Promise<void> {
    if (!this.view) return;
    try {
      const out = await this.mutate(() => this.api.skip(this.view!.sid), true);
      if (out) {
        this.view = out.state;
        this.selection.clear();
        this.render();
      }
    } catch (err) {
      this.render();
      this.showPopup(err instanceof ApiFailure ? err.message : String(err));
    }
  }

  /** Worked intro examples: the client advances through the next scripted node. */
  async nextWorkedStep(): Promise<void> {
    const view = this.view;
    if (!view?.problem || !view.worked) return;
    const justified = new Map(
      (view.nodes ?? []).filter((n) => n.justified).map((n) => [n.statement, n.id]),
    );
    const step = view.problem.expert_script.find(
      (s) => !justified.has(s.conclusion) && s.premises.every((p) => justified.has(p)),
    );
    if (!step) return;
    const premises = step.premises.map((p) => justified.get(p)!);
    const out = await this.mutate(() =>
      this.api.step(this.view!.sid, premises, step.rule, step.conclusion),
    );
    if (out) this.handleStep(out, premises, step.rule);
  }

  private async mutate<T>(call: () => Promise<T>, rethrow = false): Promise<T | null> {
    if (this.busy) return null;
    this.busy = true;
    this.render();
    try {
      return await call();
    } catch (err) {
      if (rethrow) throw err;
      this.showPopup(err instanceof ApiFailure ? err.message : String(err));
      return null;
    } finally {
      this.busy = false;
    }
  }

  // ---- rendering -----------------------------------------------------------

  render(): void {
    const view = this.view;
    this.root.textContent = "";
    if (!view) return;
    if (view.finished) {
      const done = el("div", "finished-screen");
      done.append(
        el("h2", "", "All done!"),
        el("p", "", `Thanks, ${view.student}. You finished the curriculum.`),
      );
      this.root.appendChild(done);
      return;
    }

    const header = el("div", "header");
    header.append(
      el("span", "phase-tag", `Phase: ${view.phase}`),
      el("span", "problem-tag", `Problem ${view.problem!.id}`),
      el("span", "student-tag", `${view.student} (${view.condition})`),
    );
    this.root.appendChild(header);

    const main = el("div", "main");
    this.root.appendChild(main);

    const left = el("div", "left-pane");
    main.appendChild(left);
    left.appendChild(
      renderWorkspace(view, this.layoutFor(view), this.selection, {
        onNodeClick: (n) => this.onNodeClick(n),
        onNodeDrag: (id, x, y) => {
          this.layoutFor(view).set(id, { x, y });
          this.render();
        },
      }),
    );
    left.appendChild(this.renderButtons(view));

    main.appendChild(this.renderPalette(view));
    main.appendChild(this.renderInfoBox(view));

    if (this.prompt) {
      this.root.appendChild(this.renderPrompt());
    }
  }

  private renderButtons(view: SessionView): HTMLElement {
    const bar = el("div", "button-bar");
    if (view.worked) {
      bar.appendChild(
        button("Next step", "next-step", () => void this.nextWorkedStep(), this.busy),
      );
      return bar;
    }
    if (view.hints_enabled) {
      bar.appendChild(
        button("Get Suggestion", "get-hint", () => void this.requestHint(), this.busy),
      );
    }
    bar.appendChild(button("Restart", "restart", () => void this.restart(), this.busy));
    if (view.skip_enabled) {
      bar.appendChild(button("Skip", "skip", () => void this.skip(), this.busy));
    }
    const [selected] = [...this.selection];
    if (this.selection.size === 1) {
      const node = (view.nodes ?? []).find((n) => n.id === selected);
      if (node && node.kind !== "given" && node.kind !== "conclusion") {
        bar.appendChild(
          button("Delete node", "delete-node", () => void this.deleteSelected(), this.busy),
        );
      }
    }
    // Hints are deletable too; make that discoverable next to the `?` node.
    const pendingHint = (view.nodes ?? []).find((n) => n.kind === "hint" && !n.justified);
    if (pendingHint && this.selection.size === 0) {
      bar.appendChild(
        button(
          "Dismiss hint",
          "dismiss-hint",
          () => void this.deleteHintNode(pendingHint.id),
          this.busy,
        ),
      );
    }
    return bar;
  }

  private renderPalette(view: SessionView): HTMLElement {
    const palette = el("div", "rule-palette");
    palette.appendChild(el("h3", "", "Rules"));
    for (const rule of view.problem!.catalog) {
      const b = button(rule, `rule-${rule}`, () => void this.applyRule(rule), this.busy || view.worked === true);
      b.classList.add("rule-button");
      palette.appendChild(b);
    }
    return palette;
  }

  private renderInfoBox(view: SessionView): HTMLElement {
    const box = el("div", "info-box");
    box.appendChild(el("h3", "", "Info"));
    if (view.worked) {
      box.appendChild(
        el("p", "info-worked", "Worked example: click through the addition of each node."),
      );
    }
    if (view.phase === "training" && view.focus) {
      box.appendChild(el("p", "info-focus", view.focus));
    }
    if (view.phase === "pretest" || view.phase === "posttest") {
      box.appendChild(
        el("p", "info-test", "Test problem: no hints or skipping here."),
      );
    }
    const pending = (view.nodes ?? []).find((n) => n.kind === "hint" && !n.justified);
    if (pending) {
      box.appendChild(
        el("p", "info-hint", `Try to derive the suggested statement ${pending.statement}.`),
      );
    }
    if (view.complete) {
      box.appendChild(el("p", "info-complete", "The conclusion is justified."));
    }
    box.appendChild(el("p", "info-note", this.noteText));
    return box;
  }

  private renderPrompt(): HTMLElement {
    const overlay = el("div", "prompt-overlay");
    const dialog = el("div", "prompt-dialog");
    dialog.appendChild(
      el("p", "", "Enter the statement you want to derive:"),
    );
    const input = document.createElement("input");
    input.type = "text";
    input.className = "prompt-input";
    dialog.appendChild(input);
    const ok = button("Derive", "prompt-submit", () => void this.submitPrompt(input.value), false);
    const cancel = button("Cancel", "prompt-cancel", () => this.cancelPrompt(), false);
    dialog.append(ok, cancel);
    overlay.appendChild(dialog);
    return overlay;
  }

  private noteText = "";

  note(text: string): void {
    this.noteText = text;
    this.render();
  }

  showPopup(text: string): void {
    const popup = el("div", "popup", text);
    this.root.appendChild(popup);
    setTimeout(() => {
      popup.classList.add("fading");
      setTimeout(() => popup.remove(), 600);
    }, POPUP_MS);
  }
}

function el(tag: string, className = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function button(
  label: string,
  id: string,
  onClick: () => void,
  disabled: boolean,
): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.dataset.action = id;
  b.disabled = disabled;
  b.addEventListener("click", onClick);
  return b;
}
