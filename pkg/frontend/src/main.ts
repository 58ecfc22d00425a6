import { ApiClient } from "./api";
import { App } from "./app";

// Entry point for the served page. The API origin defaults to the page
// origin; override with ?api=http://host:port. The demo session mirrors
// the cohort the server-side generator ships.
const DEMO_QUERIES = [
  {
    name: "hypertension_by_ethnicity",
    aggregate: "COUNT",
    group_by: "ethnicity",
    where: { attribute: "diagnosis", op: "==", value: "hypertension" },
    extrapolation: true,
  },
  {
    name: "hypertension_overall",
    aggregate: "COUNT",
    where: { attribute: "diagnosis", op: "==", value: "hypertension" },
  },
  {
    name: "medicated_by_sex",
    aggregate: "COUNT",
    group_by: "sex",
    where: { attribute: "on_medication", op: "==", value: true },
  },
  {
    name: "seniors",
    aggregate: "COUNT",
    where: { attribute: "age", op: ">=", value: 65 },
  },
];

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "";
  const dataset = params.get("dataset") ?? "cohort";
  const client = new ApiClient(base);
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app mount point");
  }
  try {
    const session = await client.createSession({
      dataset,
      queries: DEMO_QUERIES,
      total_budget: 2.0,
    });
    const app = new App(root, client, session);
    await app.start();
  } catch (err) {
    root.textContent = `failed to start: ${String(err)}`;
  }
}

void boot();
