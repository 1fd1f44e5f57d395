// TeX-like escape conversion for the script editor. Escapes become
// Unicode connectives the moment the user types the first non-letter
// after them, so "\to " turns into "→ " while "\topic" stays verbatim.

export const ESCAPES: Record<string, string> = {
  '\\to': '→',
  '\\land': '∧',
  '\\lor': '∨',
  '\\lnot': '¬',
  '\\bot': '⊥',
  '\\top': '⊤',
}

export interface Conversion {
  text: string
  cursor: number
}

// Convert a pending escape that ends right before `cursor`. The character
// at cursor-1 is the just-typed trigger; conversion applies only when that
// trigger is not a letter (a letter might still extend the escape name).
export function convertAtCursor(text: string, cursor: number): Conversion {
  if (cursor < 1 || cursor > text.length) return { text, cursor }
  const trigger = text[cursor - 1]
  if (/[a-zA-Z]/.test(trigger)) return { text, cursor }

  const before = text.slice(0, cursor - 1)
  const m = before.match(/\\[a-zA-Z]+$/)
  if (!m) return { text, cursor }
  const escape = m[0]
  const replacement = ESCAPES[escape]
  if (replacement === undefined) return { text, cursor }

  const start = cursor - 1 - escape.length
  const converted =
    text.slice(0, start) + replacement + text.slice(cursor - 1)
  const shift = escape.length - replacement.length
  return { text: converted, cursor: cursor - shift }
}

// Convert every known escape followed by a non-letter (or end of text).
// Used for paste handling; typing goes through convertAtCursor.
export function convertAll(text: string): string {
  return text.replace(/\\[a-zA-Z]+/g, (esc, offset: number) => {
    const next = text[offset + esc.length]
    if (next !== undefined && /[a-zA-Z]/.test(next)) return esc
    return ESCAPES[esc] ?? esc
  })
}
