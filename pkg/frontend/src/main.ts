// Bootstrap: a start form, then the workspace app.

import { TutorApi } from "./api";
import { App } from "./app";

const params = new URLSearchParams(window.location.search);
const base = params.get("server") ?? "http://127.0.0.1:8421";

const rootEl = document.getElementById("app");
if (!rootEl) throw new Error("missing #app container");

const form = document.createElement("div");
form.className = "start-form";
form.innerHTML = `
  <h1>Proof Tutor</h1>
  <label>Name <input id="student-name" type="text" value="student"></label>
  <label>Hints
    <select id="condition">
      <option value="">assign for me</option>
      <option value="NS">Next-Step</option>
      <option value="WP">Waypoint</option>
    </select>
  </label>
  <button id="start">Start</button>
  <p class="start-error"></p>
`;
rootEl.appendChild(form);

const startButton = form.querySelector<HTMLButtonElement>("#start")!;
startButton.addEventListener("click", async () => {
  const name = form.querySelector<HTMLInputElement>("#student-name")!.value.trim();
  const condition = form.querySelector<HTMLSelectElement>("#condition")!.value as
    | ""
    | "NS"
    | "WP";
  if (!name) return;
  startButton.disabled = true;
  try {
    const workspace = document.createElement("div");
    workspace.id = "workspace-root";
    const app = new App(workspace, new TutorApi(base));
    await app.start(name, condition || undefined);
    rootEl.replaceChildren(workspace);
  } catch (err) {
    form.querySelector(".start-error")!.textContent = String(err);
    startButton.disabled = false;
  }
});
