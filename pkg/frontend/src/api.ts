import type { ScreenPayload, SeriesPayload, UploadResult, Variant } from "./types.js";

/** Thin typed client over the analysis service HTTP API. */
export class ApiClient {
  constructor(private baseUrl: string = "") {}

  async health(): Promise<boolean> {
    try {
      const res = await fetch(`${this.baseUrl}/api/health`);
      return res.ok;
    } catch {
      return false;
    }
  }

  async uploadRecord(
    file: Blob,
    fs: number,
    lead?: string,
    ann?: Blob,
  ): Promise<UploadResult> {
    const form = new FormData();
    form.append("file", file, "record.csv");
    form.append("fs", String(fs));
    if (lead) form.append("lead", lead);
    if (ann) form.append("ann", ann, "record.ann");
    const res = await fetch(`${this.baseUrl}/api/records`, {
      method: "POST",
      body: form,
    });
    if (!res.ok) throw new Error(await describeError(res));
    return res.json();
  }

  async getSeries(sessionId: string, variant: Variant): Promise<SeriesPayload> {
    const res = await fetch(
      `${this.baseUrl}/api/sessions/${sessionId}/series?variant=${variant}`,
    );
    if (!res.ok) throw new Error(await describeError(res));
    return res.json();
  }

  async getScreen(
    sessionId: string,
    variant: Variant,
    alpha: number,
  ): Promise<ScreenPayload> {
    const res = await fetch(
      `${this.baseUrl}/api/sessions/${sessionId}/screen?variant=${variant}&alpha=${alpha}`,
    );
    if (!res.ok) throw new Error(await describeError(res));
    return res.json();
  }

  async deleteSession(sessionId: string): Promise<void> {
    await fetch(`${this.baseUrl}/api/sessions/${sessionId}`, { method: "DELETE" });
  }
}

async function describeError(res: Response): Promise<string> {
  try {
    const body = await res.json();
    return typeof body.detail === "string"
      ? body.detail
      : JSON.stringify(body.detail ?? body);
  } catch {
    return `${res.status} ${res.statusText}`;
  }
}
