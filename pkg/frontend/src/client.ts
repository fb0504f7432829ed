// Thin HTTP client for the treelogic game service. Every game transition is
// a service round trip; the UI never mutates game state locally.

import type { CreateSessionBody, Hint, SessionView } from "./types.js";

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ServiceError> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail) detail = JSON.stringify(body.detail);
  } catch {
    // keep statusText
  }
  return new ServiceError(response.status, detail);
}

export class GameClient {
  constructor(private baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) throw await parseError(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionView> {
    return this.request("/sessions", { method: "POST", body: JSON.stringify(body) });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request(`/sessions/${id}`);
  }

  postMove(id: string, move: string): Promise<SessionView> {
    return this.request(`/sessions/${id}/moves`, {
      method: "POST",
      body: JSON.stringify({ move }),
    });
  }

  getHint(id: string): Promise<Hint> {
    return this.request(`/sessions/${id}/hint`);
  }

  deleteSession(id: string): Promise<void> {
    return this.request(`/sessions/${id}`, { method: "DELETE" });
  }
}
