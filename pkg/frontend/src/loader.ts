/**
 * Browser-side verifying script loader.
 *
 * Fetches a third-party script as text, checks the leading `//JSSignature:`
 * comment line(s) against a pinned public key (or a pinned SHA-256 for
 * unsigned legacy resources) using WebCrypto, and only then injects the code
 * into the page - inline, so the executed bytes are exactly the verified
 * bytes. On failure it falls back to a locally hosted copy or blocks.
 *
 * Wire grammar, onion layering, and verdicts are byte-compatible with the
 * native toolchain: one signature line is
 * `//JSSignature:` [key-id ":"] base64 [CR] LF, and the signature at line i
 * covers every byte after that line's terminator (UTF-8).
 *
 * Distributed as a single self-contained script exposing the global
 * namespace `scriptSig` with `loadJs(publicKeyPem, url, fallbackUrl?, options?)`.
 */

const SIGNATURE_PREFIX = "//JSSignature:";
const PREFIX_BYTES = new TextEncoder().encode(SIGNATURE_PREFIX);
const KEY_ID_RE = /^[A-Za-z0-9_-]{1,32}$/;
const BASE64_RE = /^[A-Za-z0-9+/]+={0,2}$/;

export type FailureReason =
  | "NoMatchingRule"
  | "SignatureMissing"
  | "SignatureInvalid"
  | "ThresholdNotMet"
  | "DigestMismatch"
  | "Malformed";

export interface Verdict {
  outcome: "pass" | "fail";
  mode: "signed" | "legacy" | null;
  satisfiedKeyIds: string[];
  reason: FailureReason | null;
}

export interface VerifyOptions {
  publicKeyPem?: string;
  legacyDigestHex?: string;
}

export interface LoadRequest extends VerifyOptions {
  url: string;
  fallbackUrl?: string;
  proxyBase?: string;
  /** Test seam / embedders: defaults to the global fetch. */
  fetchFn?: typeof fetch;
  /** Defaults to the page document. */
  documentRef?: Document;
}

export type LoadOutcome =
  | { outcome: "executed_remote"; verdict: Verdict }
  | { outcome: "executed_fallback"; reason: string }
  | { outcome: "blocked"; reason: string };

class MalformedLine extends Error {}

interface ParsedLine {
  keyId: string | null;
  signature: Uint8Array;
}

interface ParsedEnvelope {
  signatures: ParsedLine[];
  /** Byte offset where each signature's coverage starts (after its LF). */
  coverageStarts: number[];
  payloadStart: number;
}

function startsWithPrefix(bytes: Uint8Array, pos: number): boolean {
  if (pos + PREFIX_BYTES.length > bytes.length) return false;
  for (let i = 0; i < PREFIX_BYTES.length; i++) {
    if (bytes[pos + i] !== PREFIX_BYTES[i]) return false;
  }
  return true;
}

function asciiSlice(bytes: Uint8Array, start: number, end: number): string {
  let out = "";
  for (let i = start; i < end; i++) {
    const b = bytes[i];
    if (b >= 0x80) throw new MalformedLine("signature line is not ASCII");
    out += String.fromCharCode(b);
  }
  return out;
}

function decodeBase64Canonical(text: string): Uint8Array {
  if (!BASE64_RE.test(text) || text.length % 4 !== 0) {
    throw new MalformedLine("invalid base64 signature text");
  }
  let binary: string;
  try {
    binary = atob(text);
  } catch {
    throw new MalformedLine("invalid base64 signature text");
  }
  if (btoa(binary) !== text) {
    throw new MalformedLine("non-canonical base64 in signature text");
  }
  return Uint8Array.from(binary, (c) => c.charCodeAt(0));
}

/** Split UTF-8 bytes into leading signature lines and payload (offsets only). */
export function parseEnvelopeBytes(bytes: Uint8Array): ParsedEnvelope {
  const signatures: ParsedLine[] = [];
  const coverageStarts: number[] = [];
  let pos = 0;
  while (startsWithPrefix(bytes, pos)) {
    const nl = bytes.indexOf(0x0a, pos);
    if (nl === -1) throw new MalformedLine("signature line lacks a LF terminator");
    const end = bytes[nl - 1] === 0x0d ? nl - 1 : nl;
    const body = asciiSlice(bytes, pos + PREFIX_BYTES.length, end);

    let keyId: string | null = null;
    let sigB64 = body;
    const colon = body.indexOf(":");
    if (colon >= 0) {
      keyId = body.slice(0, colon);
      sigB64 = body.slice(colon + 1);
      if (!KEY_ID_RE.test(keyId)) throw new MalformedLine("bad key id");
    }
    if (sigB64.length === 0) throw new MalformedLine("empty signature field");
    signatures.push({ keyId, signature: decodeBase64Canonical(sigB64) });
    pos = nl + 1;
    coverageStarts.push(pos);
  }
  return { signatures, coverageStarts, payloadStart: pos };
}

function pemToDer(pem: string): Uint8Array {
  const match = pem.match(
    /-----BEGIN PUBLIC KEY-----([A-Za-z0-9+/=\s]+)-----END PUBLIC KEY-----/,
  );
  if (!match) throw new Error("not a PEM public key");
  return Uint8Array.from(atob(match[1].replace(/\s+/g, "")), (c) => c.charCodeAt(0));
}

function toHex(bytes: Uint8Array): string {
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

// WebCrypto wants ArrayBuffer-backed views; copy out of whatever backing
// store a subarray points into.
function asBuffer(view: Uint8Array): ArrayBuffer {
  return view.buffer.slice(view.byteOffset, view.byteOffset + view.byteLength) as ArrayBuffer;
}

async function importVerifyKey(
  pem: string,
): Promise<{ key: CryptoKey; fingerprint: string }> {
  const der = asBuffer(pemToDer(pem));
  const key = await crypto.subtle.importKey(
    "spki",
    der,
    { name: "RSASSA-PKCS1-v1_5", hash: "SHA-256" },
    true,
    ["verify"],
  );
  const digest = new Uint8Array(await crypto.subtle.digest("SHA-256", der));
  return { key, fingerprint: toHex(digest).slice(0, 16) };
}

async function sha256Hex(bytes: Uint8Array): Promise<string> {
  return toHex(new Uint8Array(await crypto.subtle.digest("SHA-256", asBuffer(bytes))));
}

const fail = (reason: FailureReason, mode: Verdict["mode"]): Verdict => ({
  outcome: "fail",
  mode,
  satisfiedKeyIds: [],
  reason,
});

/**
 * Verdict for `text` under a single pinned key and/or legacy digest.
 * Byte-level semantics match the native verifier over UTF-8: signed mode
 * wins whenever signature lines are present; never throws on bad input.
 */
export async function verifyText(text: string, opts: VerifyOptions): Promise<Verdict> {
  const bytes = new TextEncoder().encode(text);
  let envelope: ParsedEnvelope;
  try {
    envelope = parseEnvelopeBytes(bytes);
  } catch (err) {
    if (err instanceof MalformedLine) return fail("Malformed", "signed");
    throw err;
  }

  if (envelope.signatures.length > 0) {
    if (!opts.publicKeyPem) return fail("SignatureInvalid", "signed");
    let imported;
    try {
      imported = await importVerifyKey(opts.publicKeyPem);
    } catch {
      return fail("SignatureInvalid", "signed");
    }
    for (let i = 0; i < envelope.signatures.length; i++) {
      const line = envelope.signatures[i];
      // The supplied key carries no declared id, so labelled lines are
      // addressed to somebody else.
      if (line.keyId !== null) continue;
      const covered = bytes.subarray(envelope.coverageStarts[i]);
      let ok = false;
      try {
        ok = await crypto.subtle.verify(
          "RSASSA-PKCS1-v1_5",
          imported.key,
          asBuffer(line.signature),
          asBuffer(covered),
        );
      } catch {
        ok = false;
      }
      if (ok) {
        return {
          outcome: "pass",
          mode: "signed",
          satisfiedKeyIds: [imported.fingerprint],
          reason: null,
        };
      }
    }
    return fail("SignatureInvalid", "signed");
  }

  if (opts.legacyDigestHex) {
    const actual = await sha256Hex(bytes);
    if (actual === opts.legacyDigestHex.toLowerCase()) {
      return { outcome: "pass", mode: "legacy", satisfiedKeyIds: [], reason: null };
    }
    return fail("DigestMismatch", "legacy");
  }

  return fail("SignatureMissing", "signed");
}

async function fetchText(url: string, fetchFn: typeof fetch): Promise<string | null> {
  try {
    const resp = await fetchFn(url);
    if (!resp.ok) return null;
    return await resp.text();
  } catch {
    return null;
  }
}

function injectInline(doc: Document, text: string): void {
  const el = doc.createElement("script");
  el.text = text;
  (doc.head ?? doc.documentElement)!.appendChild(el);
}

function injectSrc(doc: Document, url: string): void {
  const el = doc.createElement("script");
  el.src = url;
  (doc.head ?? doc.documentElement)!.appendChild(el);
}

function fallbackOrBlock(req: LoadRequest, doc: Document, reason: string): LoadOutcome {
  if (req.fallbackUrl) {
    injectSrc(doc, req.fallbackUrl);
    return { outcome: "executed_fallback", reason };
  }
  console.warn(`scriptSig: blocked ${req.url}: ${reason}`);
  return { outcome: "blocked", reason };
}

/**
 * Fetch, verify, then inject. No script element exists until the verdict is
 * Pass; the injected body is the verified text itself, so what executes is
 * exactly what was checked. A cross-origin fetch failure retries through the
 * verifying gateway when `proxyBase` is configured.
 */
export async function loadScript(req: LoadRequest): Promise<LoadOutcome> {
  if (!req.publicKeyPem && !req.legacyDigestHex) {
    throw new TypeError("loadScript needs a publicKeyPem or a legacyDigestHex");
  }
  const doc = req.documentRef ?? document;
  const fetchFn = req.fetchFn ?? fetch;

  let text = await fetchText(req.url, fetchFn);
  if (text === null && req.proxyBase) {
    const base = req.proxyBase.replace(/\/+$/, "");
    text = await fetchText(`${base}/v1/resource?url=${encodeURIComponent(req.url)}`, fetchFn);
  }
  if (text === null) {
    console.warn(`scriptSig: fetch failed for ${req.url}`);
    return fallbackOrBlock(req, doc, "FetchFailed");
  }

  const verdict = await verifyText(text, req);
  if (verdict.outcome === "pass") {
    injectInline(doc, text);
    return { outcome: "executed_remote", verdict };
  }
  console.warn(`scriptSig: verification failed for ${req.url}: ${verdict.reason}`);
  return fallbackOrBlock(req, doc, verdict.reason ?? "Malformed");
}

/** Positional convenience mirroring the documented page-facing API. */
export function loadJs(
  publicKeyPem: string,
  url: string,
  fallbackUrl?: string,
  options?: Partial<LoadRequest>,
): Promise<LoadOutcome> {
  return loadScript({ url, publicKeyPem, fallbackUrl, ...options });
}
