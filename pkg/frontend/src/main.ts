// Browser entry point.  Query parameters pick the backend and session:
//   ?api=http://host:port     service base URL (default: page origin)
//   ?session=<id>             attach to an existing session
//   ?embodiment=quadruped     or manipulator (default) for a fresh session
//   ?scene=<name>&seed=<n>    forwarded to session creation

import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? window.location.origin);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const app = createApp(root, api);
const sessionId = params.get("session");
if (sessionId) {
  void app.attach(sessionId);
} else {
  void app.start(
    params.get("embodiment") ?? "manipulator",
    params.get("scene") ?? undefined,
    Number(params.get("seed") ?? "0"),
  );
}
