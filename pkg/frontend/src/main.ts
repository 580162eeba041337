import { createApp } from "./app";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app root");
  createApp(root).catch((err) => {
    root.textContent = `failed to start session: ${err}`;
  });
});
