/** Browser entry point. */

import { Client } from "./api.js";
import { buildApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base =
  params.get("api") ?? `http://${window.location.hostname || "127.0.0.1"}:8321`;

const root = document.getElementById("app");
if (root !== null) {
  buildApp(root, new Client(base));
}
