/**
 * Child-process transport for the pulse stacking environment server.
 *
 * The core package exposes its environment over stdio as line-delimited
 * JSON (`python3 -m ops_sim serve`).  This module owns exactly that
 * boundary: it spawns one server per bridge, frames requests and replies,
 * and converts `{ok: false}` replies into typed errors.  No simulation
 * logic lives on this side of the pipe.
 */

import { ChildProcessWithoutNullStreams, spawn } from "node:child_process";
import { createInterface } from "node:readline";

/** Error reported by the core process (`{ok: false, error: {...}}`). */
export class CoreError extends Error {
  /** Core-side exception class name, e.g. "EnvUsageError". */
  readonly type: string;

  constructor(type: string, message: string) {
    super(message);
    this.name = type;
    this.type = type;
  }
}

/** Misuse of the binding caught before anything is sent to the core. */
export class EnvUsageError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EnvUsageError";
  }
}

/** True for usage errors raised on either side of the pipe. */
export function isUsageError(err: unknown): boolean {
  return (
    err instanceof EnvUsageError ||
    (err instanceof CoreError && err.type === "EnvUsageError")
  );
}

export type Reply = Record<string, unknown>;

interface Pending {
  resolve: (reply: Reply) => void;
  reject: (err: Error) => void;
}

export interface BridgeOptions {
  /** Interpreter used to start the server (default: $OPS_SIM_PYTHON or "python3"). */
  pythonPath?: string;
  /** Serve the test-noise instance instead of the training instance. */
  testInstance?: boolean;
}

/**
 * One environment server process plus a request/reply queue over its stdio.
 *
 * The server answers strictly in request order, so replies are matched to
 * callers FIFO.  A bridge is not shareable across concurrent trainers; use
 * one bridge per worker.
 */
export class ServeBridge {
  private readonly child: ChildProcessWithoutNullStreams;
  private readonly pending: Pending[] = [];
  private stderrTail = "";
  private exitReason: string | null = null;
  private closing = false;

  constructor(config: Record<string, unknown>, options: BridgeOptions = {}) {
    const python = options.pythonPath ?? process.env.OPS_SIM_PYTHON ?? "python3";
    const args = ["-m", "ops_sim", "serve", "--config-json", JSON.stringify(config)];
    if (options.testInstance) {
      args.push("--test");
    }
    this.child = spawn(python, args, { stdio: ["pipe", "pipe", "pipe"] });

    const lines = createInterface({ input: this.child.stdout });
    lines.on("line", (line) => this.onLine(line));
    this.child.stderr.on("data", (chunk: Buffer) => {
      this.stderrTail = (this.stderrTail + chunk.toString()).slice(-4000);
    });
    this.child.on("error", (err) => {
      this.exitReason = `failed to start '${python}': ${err.message}`;
      this.rejectAllPending();
    });
    this.child.on("close", (code, signal) => {
      if (this.exitReason === null) {
        this.exitReason = `server exited (code=${code}, signal=${signal})`;
      }
      this.rejectAllPending();
    });
  }

  /** True once the server process is gone or close() has begun. */
  get closed(): boolean {
    return this.closing || this.exitReason !== null;
  }

  /** Send one request object; resolves with the matching reply. */
  request(payload: Record<string, unknown>): Promise<Reply> {
    if (this.closed) {
      return Promise.reject(new EnvUsageError(this.closedMessage()));
    }
    return new Promise<Reply>((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.child.stdin.write(JSON.stringify(payload) + "\n", (err) => {
        if (err) {
          const index = this.pending.findIndex((p) => p.resolve === resolve);
          if (index >= 0) {
            this.pending.splice(index, 1);
          }
          reject(new CoreError("TransportError", `write failed: ${err.message}`));
        }
      });
    });
  }

  /** Ask the server to shut down and wait for the process to exit. */
  async close(): Promise<void> {
    if (this.closed) {
      return;
    }
    this.closing = true;
    const exited = new Promise<void>((resolve) => {
      if (this.child.exitCode !== null || this.child.signalCode !== null) {
        resolve();
        return;
      }
      this.child.once("close", () => resolve());
    });
    try {
      await new Promise<void>((resolve, reject) => {
        this.pending.push({ resolve: () => resolve(), reject });
        this.child.stdin.write('{"op": "close"}\n', (err) => {
          if (err) {
            resolve(); // already gone; the exit handler does the cleanup
          }
        });
      });
    } catch {
      // A dying server is what close() asks for; ignore the manner of death.
    }
    const timeout = setTimeout(() => this.child.kill("SIGKILL"), 5000);
    await exited;
    clearTimeout(timeout);
  }

  private onLine(line: string): void {
    const next = this.pending.shift();
    if (next === undefined) {
      return; // unsolicited output; nothing is waiting on it
    }
    let reply: Reply;
    try {
      reply = JSON.parse(line) as Reply;
    } catch (err) {
      next.reject(new CoreError("TransportError", `unparseable reply: ${String(err)}`));
      return;
    }
    if (reply.ok === true) {
      next.resolve(reply);
      return;
    }
    const error = reply.error as { type?: string; message?: string } | undefined;
    next.reject(
      new CoreError(error?.type ?? "InternalError", error?.message ?? "unknown server error"),
    );
  }

  private rejectAllPending(): void {
    const reason = this.closedMessage();
    while (this.pending.length > 0) {
      const next = this.pending.shift();
      next?.reject(new CoreError("TransportError", reason));
    }
  }

  private closedMessage(): string {
    const base = this.exitReason ?? "bridge is closed";
    return this.stderrTail === "" ? base : `${base}; server stderr: ${this.stderrTail.trim()}`;
  }
}
