// Spawn the real Python service over the fixture base and wait for it.

import { ChildProcess, spawn } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";

const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..");

export interface LiveService {
  url: string;
  stop: () => Promise<void>;
}

export async function startService(): Promise<LiveService> {
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "procline.cli", "serve", "--base", path.join(REPO_ROOT, "fixtures", "process_base.json")],
    {
      env: {
        ...process.env,
        PROCLINE_LISTEN: "127.0.0.1:0",
        PYTHONPATH: path.join(REPO_ROOT, "src"),
      },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );

  const url = await new Promise<string>((resolve, reject) => {
    let output = "";
    const timer = setTimeout(() => reject(new Error(`service did not start: ${output}`)), 15000);
    child.stdout?.on("data", (chunk: Buffer) => {
      output += chunk.toString();
      const match = output.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1] as string);
      }
    });
    child.stderr?.on("data", (chunk: Buffer) => {
      output += chunk.toString();
    });
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited with ${code}: ${output}`));
    });
  });

  return {
    url,
    stop: () =>
      new Promise((resolve) => {
        child.on("exit", () => resolve());
        child.kill("SIGTERM");
      }),
  };
}

export async function waitFor(predicate: () => boolean, timeoutMs = 5000): Promise<void> {
  const started = Date.now();
  while (!predicate()) {
    if (Date.now() - started > timeoutMs) {
      throw new Error("condition not reached in time");
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

// A fresh session driven to the tailoring phase on variant `variantId`.
export async function sessionInTailoring(api: {
  createSession(): Promise<{ id: string }>;
  sessionAction(id: string, type: string, payload: Record<string, unknown>): Promise<unknown>;
}, variantId = "v-standard"): Promise<string> {
  const { id } = await api.createSession();
  await api.sessionAction(id, "select_top_k", {
    characteristics: [
      { name: "domain", value: "automotive", weight: 2 },
      { name: "team-size", value: 8, weight: 1, range: [2, 20] },
      { name: "safety-level", value: "qm", weight: 1 },
    ],
    k: 2,
  });
  await api.sessionAction(id, "cut", { level: 2 });
  await api.sessionAction(id, "mark_selected", { variant_id: variantId });
  return id;
}
