// Minimal parser for the daemon's XML responses. The grammar is tiny and
// machine-generated (elements, double-quoted attributes, CDATA, escaped
// text), so a hand-rolled scanner keeps the client dependency-free and
// testable under node, where DOMParser is unavailable.

export interface XmlNode {
  tag: string
  attrs: Record<string, string>
  children: XmlNode[]
  text: string
}

const ENTITIES: Record<string, string> = {
  '&amp;': '&',
  '&lt;': '<',
  '&gt;': '>',
  '&quot;': '"',
  '&apos;': "'",
}

function unescape(s: string): string {
  return s.replace(/&(amp|lt|gt|quot|apos);/g, (e) => ENTITIES[e])
}

class Scanner {
  pos = 0
  constructor(readonly input: string) {}

  error(msg: string): never {
    throw new Error(`xml: ${msg} at offset ${this.pos}`)
  }

  parseElement(): XmlNode {
    if (this.input[this.pos] !== '<') this.error('expected element')
    this.pos++
    const tagMatch = /^[A-Za-z][A-Za-z0-9_-]*/.exec(this.input.slice(this.pos))
    if (!tagMatch) this.error('expected tag name')
    const tag = tagMatch[0]
    this.pos += tag.length

    const attrs: Record<string, string> = {}
    for (;;) {
      while (this.input[this.pos] === ' ') this.pos++
      const c = this.input[this.pos]
      if (c === '/' || c === '>') break
      const m = /^([A-Za-z][A-Za-z0-9_-]*)="([^"]*)"/.exec(
        this.input.slice(this.pos))
      if (!m) this.error('expected attribute')
      attrs[m[1]] = unescape(m[2])
      this.pos += m[0].length
    }

    if (this.input.startsWith('/>', this.pos)) {
      this.pos += 2
      return { tag, attrs, children: [], text: '' }
    }
    this.pos++ // '>'

    const children: XmlNode[] = []
    let text = ''
    for (;;) {
      if (this.pos >= this.input.length) this.error(`unclosed <${tag}>`)
      if (this.input.startsWith('</', this.pos)) {
        const close = `</${tag}>`
        if (!this.input.startsWith(close, this.pos)) {
          this.error(`mismatched close for <${tag}>`)
        }
        this.pos += close.length
        return { tag, attrs, children, text }
      }
      if (this.input.startsWith('<![CDATA[', this.pos)) {
        const end = this.input.indexOf(']]>', this.pos + 9)
        if (end < 0) this.error('unterminated CDATA')
        text += this.input.slice(this.pos + 9, end)
        this.pos = end + 3
        continue
      }
      if (this.input[this.pos] === '<') {
        children.push(this.parseElement())
        continue
      }
      const next = this.input.indexOf('<', this.pos)
      const stop = next < 0 ? this.input.length : next
      text += unescape(this.input.slice(this.pos, stop))
      this.pos = stop
    }
  }
}

export function parseXml(input: string): XmlNode {
  const scanner = new Scanner(input.trim())
  const root = scanner.parseElement()
  if (scanner.pos !== scanner.input.length) scanner.error('trailing content')
  return root
}

export function child(node: XmlNode, tag: string): XmlNode | undefined {
  return node.children.find((c) => c.tag === tag)
}

export function childAll(node: XmlNode, tag: string): XmlNode[] {
  return node.children.filter((c) => c.tag === tag)
}

// -- typed views of the protocol responses ---------------------------------

export interface GoalView {
  hyps: { name: string; formula: string }[]
  concl: string
}

export interface CandidateView {
  uri: string
  kind: string
  display: string
}

export interface ChoicesView {
  lexeme: string
  offset: number
  length: number
  candidates: CandidateView[]
}

export interface ErrorView {
  code: string
  offset: number
  length: number
  message: string
}

export interface ExecuteView {
  consumed: number
  statements: string[]
  goals: GoalView[]
  error?: ErrorView
  choices?: ChoicesView
}

export function readGoals(response: XmlNode): GoalView[] {
  const goals = child(response, 'goals')
  if (!goals) return []
  return childAll(goals, 'goal').map((g) => ({
    hyps: childAll(g, 'hyp').map((h) => ({
      name: h.attrs['name'],
      formula: h.text,
    })),
    concl: child(g, 'concl')?.text ?? '',
  }))
}

export function readError(response: XmlNode): ErrorView | undefined {
  const err = child(response, 'error')
  if (!err) return undefined
  return {
    code: err.attrs['code'],
    offset: Number(err.attrs['offset']),
    length: Number(err.attrs['length']),
    message: err.text,
  }
}

export function readExecute(body: string): ExecuteView {
  const response = parseXml(body)
  const executed = child(response, 'executed')
  const choicesNode = child(response, 'choices')
  const view: ExecuteView = {
    consumed: executed ? Number(executed.attrs['chars']) : 0,
    statements: childAll(response, 'statement').map((s) => s.text),
    goals: readGoals(response),
    error: readError(response),
  }
  if (choicesNode) {
    view.choices = {
      lexeme: choicesNode.attrs['lexeme'],
      offset: Number(choicesNode.attrs['offset']),
      length: Number(choicesNode.attrs['length']),
      candidates: childAll(choicesNode, 'candidate').map((c) => ({
        uri: c.attrs['uri'],
        kind: c.attrs['kind'],
        display: child(c, 'display')?.text ?? '',
      })),
    }
  }
  return view
}

export interface UndoView {
  steps: number
  remaining: number
  goals: GoalView[]
}

export function readUndo(body: string): UndoView {
  const response = parseXml(body)
  const undone = child(response, 'undone')
  return {
    steps: undone ? Number(undone.attrs['steps']) : 0,
    remaining: undone ? Number(undone.attrs['remaining']) : 0,
    goals: readGoals(response),
  }
}
