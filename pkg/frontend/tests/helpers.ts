/** Stub fetch implementing the slice of the service contract the client
 * logic touches, with call recording for assertions. */

import type { Diagnostic } from "../src/types.js";

export interface RecordedCall {
  url: string;
  method: string;
  body: any;
}

export interface StubRoute {
  match: (url: string, method: string) => boolean;
  respond: (body: any, url: string) => StubResponse;
}

export interface StubResponse {
  status: number;
  json?: any;
  bytes?: Uint8Array;
}

export function makeStubFetch(routes: StubRoute[]) {
  const calls: RecordedCall[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : null;
    calls.push({ url, method, body });
    for (const route of routes) {
      if (route.match(url, method)) {
        const result = route.respond(body, url);
        if (result.bytes !== undefined) {
          return new Response(new Uint8Array(result.bytes).buffer, {
            status: result.status,
            headers: { "content-type": "image/png" },
          });
        }
        return new Response(JSON.stringify(result.json ?? {}), {
          status: result.status,
          headers: { "content-type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ error: `no stub for ${method} ${url}` }), { status: 500 });
  };
  return { fetchImpl, calls };
}

export function errorBody(message: string, diagnostics?: Diagnostic[]) {
  return diagnostics ? { error: message, diagnostics } : { error: message };
}
