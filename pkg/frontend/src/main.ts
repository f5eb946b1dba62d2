import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
// served under /ui from the analysis service itself, so same-origin API
const app = new App(root, new ApiClient(window.location.origin));
app.mount();

declare global {
  interface Window {
    sisexplorer: App;
  }
}
window.sisexplorer = app;
