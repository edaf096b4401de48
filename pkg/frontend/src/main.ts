import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

// Same-origin by default; set window.CITECHECK_API to point elsewhere.
const baseUrl = (window as { CITECHECK_API?: string }).CITECHECK_API ?? "";
new App(root, new ApiClient(baseUrl));
