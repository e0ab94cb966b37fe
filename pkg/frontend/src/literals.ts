/**
 * Numeric-literal discovery. This mirrors just enough of the pattern grammar
 * to locate node-parameter number literals and name them with the same node
 * paths the server uses - nothing here evaluates a program. Slider ranges
 * come from the server's literal metadata; this module only finds the text
 * spans to splice when a slider moves.
 */

export interface LiteralSite {
  nodePath: string; // e.g. /layer[0]/fragmenter/param[rows]
  start: number; // char offset of the number literal
  end: number; // exclusive
  text: string;
}

interface Token {
  type: "lparen" | "rparen" | "keyword" | "number" | "string" | "ident";
  start: number;
  end: number;
  text: string;
}

const FRAGMENTERS = new Set(["grid", "brick", "stripes", "voronoi"]);
const OPS = new Set(["inset", "scale", "rotate", "round"]);
const STYLES = new Set(["fill", "outline", "place-motif"]);

export function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (ch === ";") {
      while (i < text.length && text[i] !== "\n") i++;
      continue;
    }
    if (/\s/.test(ch)) {
      i++;
      continue;
    }
    if (ch === "(" || ch === ")") {
      tokens.push({ type: ch === "(" ? "lparen" : "rparen", start: i, end: i + 1, text: ch });
      i++;
      continue;
    }
    if (ch === ":") {
      const m = /^:[A-Za-z][A-Za-z0-9_-]*/.exec(text.slice(i));
      if (!m) throw new Error(`bare ':' at offset ${i}`);
      tokens.push({ type: "keyword", start: i, end: i + m[0].length, text: m[0] });
      i += m[0].length;
      continue;
    }
    if (ch === '"') {
      let j = i + 1;
      while (j < text.length && text[j] !== '"') {
        j += text[j] === "\\" ? 2 : 1;
      }
      if (j >= text.length) throw new Error(`unterminated string at offset ${i}`);
      tokens.push({ type: "string", start: i, end: j + 1, text: text.slice(i, j + 1) });
      i = j + 1;
      continue;
    }
    const num = /^-?(?:\d+\.\d*|\.\d+|\d+)/.exec(text.slice(i));
    if (num) {
      tokens.push({ type: "number", start: i, end: i + num[0].length, text: num[0] });
      i += num[0].length;
      continue;
    }
    const ident = /^[A-Za-z][A-Za-z0-9_-]*/.exec(text.slice(i));
    if (ident) {
      tokens.push({ type: "ident", start: i, end: i + ident[0].length, text: ident[0] });
      i += ident[0].length;
      continue;
    }
    throw new Error(`unexpected character ${ch!} at offset ${i}`);
  }
  return tokens;
}

/**
 * Find every node-parameter number literal (field-internal numbers are
 * intentionally skipped; the server publishes no ranges for them).
 * Returns [] when the text does not lex or is not shaped like a program.
 */
export function discoverLiterals(text: string): LiteralSite[] {
  let tokens: Token[];
  try {
    tokens = tokenize(text);
  } catch {
    return [];
  }
  const sites: LiteralSite[] = [];
  let pos = 0;

  const peek = () => tokens[pos];
  const next = () => tokens[pos++];

  function skipValue(): void {
    const tok = peek();
    if (!tok) return;
    if (tok.type === "lparen") {
      let depth = 0;
      do {
        const t = next();
        if (!t) return;
        if (t.type === "lparen") depth++;
        if (t.type === "rparen") depth--;
      } while (depth > 0 && pos < tokens.length);
    } else {
      next();
    }
  }

  function readNodeForm(nodePath: string): void {
    // positioned after '(' head; consume kv pairs until ')'
    while (pos < tokens.length && peek().type !== "rparen") {
      const tok = next();
      if (tok.type !== "keyword") {
        // tolerate anything unexpected by skipping it
        continue;
      }
      const param = tok.text.slice(1);
      const value = peek();
      if (value && value.type === "number") {
        next();
        sites.push({
          nodePath: `${nodePath}/param[${param}]`,
          start: value.start,
          end: value.end,
          text: value.text,
        });
      } else {
        skipValue();
      }
    }
    if (pos < tokens.length) next(); // ')'
  }

  function skipForm(): void {
    let depth = 0;
    do {
      const t = next();
      if (!t) return;
      if (t.type === "lparen") depth++;
      if (t.type === "rparen") depth--;
    } while (depth > 0 && pos < tokens.length);
  }

  // (pattern kv* (canvas ...) (layer ...)+)
  if (!peek() || next().type !== "lparen") return [];
  const head = next();
  if (!head || head.text !== "pattern") return [];
  while (pos < tokens.length && peek().type === "keyword") {
    next();
    skipValue();
  }
  let layerIndex = 0;
  while (pos < tokens.length && peek().type === "lparen") {
    const formHead = tokens[pos + 1];
    if (!formHead) break;
    if (formHead.text === "canvas") {
      skipForm();
      continue;
    }
    if (formHead.text !== "layer") {
      skipForm();
      continue;
    }
    next(); // (
    next(); // layer
    const base = `/layer[${layerIndex}]`;
    let mergeIndex = 0;
    let opIndex = 0;
    let styleIndex = 0;
    while (pos < tokens.length && peek().type !== "rparen") {
      const tok = peek();
      if (tok.type === "lparen") {
        const inner = tokens[pos + 1];
        next(); // consume '('
        next(); // consume head
        if (inner && FRAGMENTERS.has(inner.text)) {
          readNodeForm(`${base}/fragmenter`);
        } else if (inner && inner.text === "merge") {
          readNodeForm(`${base}/merges[${mergeIndex++}]`);
        } else if (inner && OPS.has(inner.text)) {
          readNodeForm(`${base}/fragmentOps[${opIndex++}]`);
        } else if (inner && STYLES.has(inner.text)) {
          readNodeForm(`${base}/style[${styleIndex++}]`);
        } else {
          // unknown or field form at layer level; skip its body
          let depth = 1;
          while (depth > 0 && pos < tokens.length) {
            const t = next();
            if (t.type === "lparen") depth++;
            if (t.type === "rparen") depth--;
          }
        }
      } else {
        next();
        if (tok.type === "keyword") skipValue();
      }
    }
    if (pos < tokens.length) next(); // close layer
    layerIndex++;
  }
  return sites;
}

/** Replace one literal's text, returning the new program text. */
export function spliceLiteral(text: string, site: LiteralSite, replacement: string): string {
  return text.slice(0, site.start) + replacement + text.slice(site.end);
}

/** Format a slider value the way the canonical printer would. */
export function formatNumber(value: number, integer: boolean): string {
  if (integer) return String(Math.round(value));
  const fixed = value.toFixed(6).replace(/0+$/, "").replace(/\.$/, "");
  return fixed === "-0" || fixed === "" ? "0" : fixed;
}
