/**
 * Secondary acceptance: run the real hub, seed the bundled six-service
 * corpus, and check every dashboard surface against live API responses.
 */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtemp, readdir, readFile, rm } from "node:fs/promises";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { HubClient } from "../src/api.js";
import { findAll, findByClass, textOf } from "../src/render.js";
import { datumDetailView } from "../src/views/datumDetail.js";
import { flowView, parseLinkLines } from "../src/views/flow.js";
import { serviceIndexView } from "../src/views/serviceIndex.js";
import { submitSystemInfo, systemInfoForm, SystemInfoFormValues } from "../src/views/systemInfo.js";

const FIXTURES = fileURLToPath(
  new URL("../../src/openapi_transparency/fixtures/fitness/", import.meta.url),
);

let hub: ChildProcess | null = null;
let dataDir = "";
let client: HubClient;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.once("error", reject);
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      server.close(() =>
        typeof address === "object" && address ? resolve(address.port) : reject(new Error("no port")),
      );
    });
  });
}

async function waitForHub(base: string): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/api/report`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("hub did not come up in time");
}

beforeAll(async () => {
  const port = await freePort();
  dataDir = await mkdtemp(join(tmpdir(), "hub-data-"));
  hub = spawn(
    "python3",
    ["-m", "openapi_transparency", "serve", "--port", String(port), "--data-dir", dataDir],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const base = `http://127.0.0.1:${port}`;
  client = new HubClient(base);
  await waitForHub(base);

  const specs = (await readdir(FIXTURES)).filter((name) => name.endsWith(".yaml")).sort();
  expect(specs).toHaveLength(6);
  for (const name of specs) {
    const spec = await readFile(join(FIXTURES, name), "utf-8");
    await client.registerService(name.replace(/\.yaml$/, ""), spec);
  }
  const links = JSON.parse(await readFile(join(FIXTURES, "links.json"), "utf-8"));
  await client.setLinks(links.edges);
}, 60_000);

afterAll(async () => {
  hub?.kill();
  if (dataDir) await rm(dataDir, { recursive: true, force: true });
});

describe("against the live hub", () => {
  it("service index renders six services with the no-personal-data one listed separately", async () => {
    const index = await client.listServices();
    const view = serviceIndexView(index);
    const rows = findByClass(view, "service-row");
    expect(rows).toHaveLength(6);
    expect(index.no_personal_data.map((s) => s.id)).toEqual(["social-network"]);
    expect(findByClass(view, "no-personal-data-header")).toHaveLength(1);
  }, 15_000);

  it("datum detail displays processing services and the unlimited retention byte-for-byte", async () => {
    const datum = await client.getDatum("Stepcount");
    const view = datumDetailView(datum);

    const services = findAll(view, (node) => node.attrs["data-service"] !== undefined).map(
      (node) => node.attrs["data-service"],
    );
    expect(services).toEqual([
      "activity-database",
      "device-api",
      "main-application",
      "message-broker",
      "sanitizer-function",
    ]);

    expect(findByClass(view, "badge").map(textOf)).toContain("unlimited");

    // every rendered merged value must byte-match an independent fetch
    const independent = await client.getDatum("Stepcount");
    for (const rendered of findByClass(view, "merged-value")) {
      const kind = rendered.attrs["data-kind"];
      expect(textOf(rendered)).toBe(JSON.stringify(independent.merged[kind]));
    }
  }, 15_000);

  it("link-editor mutations round-trip through the API and the re-fetched graph reflects them", async () => {
    const before = await client.flow();
    const lines =
      before.edges
        .map((edge) => `${edge.sender} -> ${edge.receiver}: ${edge.datum_names.join(", ")}`)
        .join("\n") + "\ndevice-api -> social-network: Stepcount";
    await client.setLinks(parseLinkLines(lines));

    const after = await client.flow();
    const added = after.edges.find(
      (edge) => edge.sender === "device-api" && edge.receiver === "social-network",
    );
    expect(added).toBeDefined();
    expect(added!.datum_names).toEqual(["Stepcount"]);

    const view = flowView(after, client.reportDotUrl(), null, () => undefined);
    const drawn = findByClass(view, "flow-edge").map((edge) => edge.attrs["data-edge"]);
    expect(drawn).toContain("device-api->social-network");

    // restore the corpus links for any later assertions
    await client.setLinks(before.edges);
  }, 15_000);

  it("system-info form surfaces the mandatory-provision validation error inline", async () => {
    const values: SystemInfoFormValues = {
      controller_name: "FitnessApp Inc.",
      controller_email: "privacy@example.com",
      dpo_name: "",
      dpo_email: "",
      third_country_safeguards: "",
      legal_bases: ["consent"],
      legitimate_interest_note: "",
      right_rectification_deletion_portability: true,
      right_withdraw_consent: true,
      right_lodge_complaint: true,
      provision_mandatory: true,
      consequences_note: "",
      data_subject_categories: "customers",
    };
    const result = await submitSystemInfo(client, values);
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.field).toBe("consequences_note");

    const view = systemInfoForm(values, { [result.field!]: result.message }, null, () => undefined);
    const container = findAll(view, (node) => node.attrs["data-name"] === "consequences_note")[0];
    const inline = findByClass(container, "field-error");
    expect(inline).toHaveLength(1);
    expect(textOf(inline[0])).toMatch(/consequences|note/i);

    // a corrected submission is accepted
    const fixed = await submitSystemInfo(client, { ...values, consequences_note: "features unavailable" });
    expect(fixed.ok).toBe(true);
  }, 15_000);

  it("flow view closure pairs come straight from the API", async () => {
    const flow = await client.flow();
    const view = flowView(flow, client.reportDotUrl(), null, () => undefined);
    const pairs = findAll(view, (node) => node.attrs["data-pair"] !== undefined).map(
      (node) => node.attrs["data-pair"],
    );
    expect(pairs).toEqual(flow.closure.map(([s, t]) => `${s}->${t}`));
    expect(pairs).toContain("device-api->main-application");
  }, 15_000);
});
