// Display rendering for enriched statements. The input is the exact CDATA
// text the daemon returned: plain script text with `<A href>` hyperlinks,
// `<T>` trace spans, and `(* *)` comments that may carry HTML. Rendering
// is a pure string transform; expansion state for trace spans is passed in
// so the caller can re-render on toggle without any DOM coupling here.

const HTML_ESCAPES: Record<string, string> = {
  '&': '&amp;',
  '<': '&lt;',
  '>': '&gt;',
  '"': '&quot;',
}

function escapeHtml(s: string): string {
  return s.replace(/[&<>"]/g, (c) => HTML_ESCAPES[c])
}

const ALLOWED_TAGS = new Set(['b', 'i', 'em', 'strong', 'a', 'img', 'code'])

function safeUrl(url: string): boolean {
  return /^(https?:\/\/|\/|[A-Za-z0-9_.-]+(\/|$))/.test(url) &&
    !/^[a-zA-Z]+:/.test(url.replace(/^https?:/, ''))
}

function sanitizeTag(raw: string, tag: string, closing: boolean): string {
  if (closing) return `</${tag}>`
  const attrs: string[] = []
  const attrRe = /([a-zA-Z-]+)\s*=\s*"([^"]*)"/g
  let m: RegExpExecArray | null
  while ((m = attrRe.exec(raw)) !== null) {
    const name = m[1].toLowerCase()
    const value = m[2]
    if (tag === 'a' && name === 'href' && safeUrl(value)) {
      attrs.push(`href="${escapeHtml(value)}"`)
    } else if (tag === 'img' && name === 'src' && safeUrl(value)) {
      attrs.push(`src="${escapeHtml(value)}"`)
    } else if (tag === 'img' && name === 'alt') {
      attrs.push(`alt="${escapeHtml(value)}"`)
    } else if (name === 'title') {
      attrs.push(`title="${escapeHtml(value)}"`)
    }
  }
  const joined = attrs.length > 0 ? ' ' + attrs.join(' ') : ''
  return tag === 'img' ? `<img${joined}>` : `<${tag}${joined}>`
}

// Comment bodies may carry author HTML; keep a small whitelist, drop the
// rest (script/style bodies included), escape everything that is not a
// recognized tag.
export function sanitizeHtml(input: string): string {
  let html = input.replace(/<(script|style)\b[\s\S]*?<\/\1\s*>/gi, '')
  const tagRe = /<\s*(\/?)\s*([a-zA-Z][a-zA-Z0-9]*)((?:[^"'>]|"[^"]*"|'[^']*')*)>/g
  let out = ''
  let pos = 0
  let m: RegExpExecArray | null
  while ((m = tagRe.exec(html)) !== null) {
    out += escapeHtml(html.slice(pos, m.index))
    const tag = m[2].toLowerCase()
    if (ALLOWED_TAGS.has(tag)) {
      out += sanitizeTag(m[3], tag, m[1] === '/')
    }
    pos = m.index + m[0].length
  }
  out += escapeHtml(html.slice(pos))
  return out
}

// One enriched statement to display HTML. `expanded` holds the indices of
// trace spans (0-based within this statement) currently shown in full.
export function renderStatement(
  text: string,
  expanded: Set<number> = new Set(),
): string {
  let out = ''
  let pos = 0
  let traceIndex = 0
  while (pos < text.length) {
    if (text.startsWith('(*', pos)) {
      let depth = 1
      let end = pos + 2
      while (end < text.length && depth > 0) {
        if (text.startsWith('(*', end)) {
          depth++
          end += 2
        } else if (text.startsWith('*)', end)) {
          depth--
          end += 2
        } else {
          end++
        }
      }
      const inner = text.slice(pos + 2, Math.max(pos + 2, end - 2))
      out += `<span class="comment">(*${sanitizeHtml(inner)}*)</span>`
      pos = end
      continue
    }
    const link = /^<A href="([^"]*)">/.exec(text.slice(pos))
    if (link) {
      const close = text.indexOf('</A>', pos + link[0].length)
      const body = close < 0
        ? text.slice(pos + link[0].length)
        : text.slice(pos + link[0].length, close)
      out += `<span class="link" title="${escapeHtml(link[1])}">` +
        escapeHtml(body) + '</span>'
      pos = close < 0 ? text.length : close + 4
      continue
    }
    if (text.startsWith('<T>', pos)) {
      const close = text.indexOf('</T>', pos + 3)
      const body = close < 0 ? text.slice(pos + 3) : text.slice(pos + 3, close)
      const idx = traceIndex++
      if (expanded.has(idx)) {
        out += `<span class="trace" data-trace="${idx}">` +
          '<button class="trace-toggle" type="button">⯆</button>' +
          `<span class="trace-body">${escapeHtml(body)}</span></span>`
      } else {
        out += `<span class="trace" data-trace="${idx}">` +
          '<button class="trace-toggle" type="button">⯈</button></span>'
      }
      pos = close < 0 ? text.length : close + 4
      continue
    }
    const next = Math.min(
      ...['(*', '<A href="', '<T>']
        .map((s) => text.indexOf(s, pos + 1))
        .filter((i) => i >= 0)
        .concat([text.length]),
    )
    out += escapeHtml(text.slice(pos, next))
    pos = next
  }
  return out
}

export function countTraces(text: string): number {
  return (text.match(/<T>/g) ?? []).length
}
