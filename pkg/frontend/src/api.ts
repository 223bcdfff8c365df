// Thin typed client for the tutor service. Every derivation decision is
// the server's; this file only moves JSON.

import type { HintPayload, ProblemView, SessionView, StepResponse } from "./types";

export class ApiFailure extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const body = await resp.json();
  if (!resp.ok) {
    throw new ApiFailure(resp.status, (body as { error?: string }).error ?? "request failed");
  }
  return body as T;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body ?? {}),
  };
}

export class TutorApi {
  constructor(readonly base: string) {}

  createSession(studentId: string, condition?: "NS" | "WP"): Promise<SessionView> {
    return request(`${this.base}/sessions`, post({ student_id: studentId, condition }));
  }

  state(sid: string): Promise<SessionView> {
    return request(`${this.base}/sessions/${sid}`);
  }

  /**
   * One rule application. 422 responses (invalid rule use) come back as a
   * normal StepResponse with result "error", never as an exception: the
   * workspace shows them as popups.
   */
  async step(
    sid: string,
    premises: number[],
    rule: string,
    claimed?: string,
  ): Promise<StepResponse> {
    const resp = await fetch(
      `${this.base}/sessions/${sid}/steps`,
      post({ premises, rule, claimed }),
    );
    const body = (await resp.json()) as StepResponse & { error?: string };
    if (!resp.ok && resp.status !== 422) {
      throw new ApiFailure(resp.status, body.error ?? "step failed");
    }
    return body;
  }

  requestHint(sid: string): Promise<{ hint: HintPayload; state: SessionView }> {
    return request(`${this.base}/sessions/${sid}/hint`, post({}));
  }

  deleteNode(sid: string, nodeId: number): Promise<{ removed: number[]; state: SessionView }> {
    return request(`${this.base}/sessions/${sid}/nodes/${nodeId}/delete`, post({}));
  }

  restart(sid: string): Promise<{ state: SessionView }> {
    return request(`${this.base}/sessions/${sid}/restart`, post({}));
  }

  skip(sid: string): Promise<{ finished: boolean; state: SessionView }> {
    return request(`${this.base}/sessions/${sid}/skip`, post({}));
  }

  problems(): Promise<ProblemView[]> {
    return request(`${this.base}/problems`);
  }
}
