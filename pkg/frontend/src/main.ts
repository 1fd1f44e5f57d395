// Browser wiring. All state transitions live in uistate.ts; this file only
// moves data between the DOM, the Client, and the rendered locked region.

import { Client, ProtocolError } from './client'
import { renderStatement } from './render'
import { convertAll, convertAtCursor } from './tex'
import {
  UiState,
  applyEdit,
  applyExecuted,
  applyUndo,
  initialState,
  lockedText,
  resolveChoice,
} from './uistate'
import { ChoicesView, ErrorView } from './xml'

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

const client = new Client('')
let state: UiState = initialState()
let lastMode: 'one' | 'all' = 'one'
// per locked statement: which trace spans are expanded
const expandedTraces: Map<number, Set<number>> = new Map()

const editor = el<HTMLTextAreaElement>('editor')
const locked = el<HTMLDivElement>('locked')
const goalsPanel = el<HTMLDivElement>('goals')
const statusLine = el<HTMLDivElement>('status')
const dialog = el<HTMLDivElement>('choice-dialog')
const candidateList = el<HTMLUListElement>('candidates')

function setBusy(busy: boolean): void {
  state = { ...state, busy }
  for (const id of ['step', 'run', 'undo-one', 'undo-all']) {
    el<HTMLButtonElement>(id).disabled = busy
  }
  editor.disabled = busy
}

function showStatus(message: string, isError = false): void {
  statusLine.textContent = message
  statusLine.className = isError ? 'status error' : 'status'
}

function redraw(): void {
  locked.innerHTML = state.lockedStatements
    .map((s, i) =>
      `<span class="stmt" data-stmt="${i}">` +
      renderStatement(s, expandedTraces.get(i) ?? new Set()) + '</span>')
    .join('')
  if (editor.value !== state.remainder) editor.value = state.remainder
  goalsPanel.innerHTML = state.goals.length === 0
    ? '<div class="goal done">no open goals</div>'
    : state.goals
      .map((g) =>
        '<div class="goal">' +
        g.hyps
          .map((h) => `<div class="hyp">${h.name} : ${h.formula}</div>`)
          .join('') +
        `<div class="concl">⊢ ${g.concl}</div></div>`)
      .join('')
  if (state.pendingChoices) {
    showChoiceDialog(state.pendingChoices)
  } else {
    dialog.hidden = true
  }
}

function showChoiceDialog(choices: ChoicesView): void {
  candidateList.innerHTML = ''
  for (const candidate of choices.candidates) {
    const item = document.createElement('li')
    const button = document.createElement('button')
    button.type = 'button'
    button.textContent = `${candidate.uri} — ${candidate.display}`
    button.addEventListener('click', () => {
      state = resolveChoice(state, candidate.uri)
      dialog.hidden = true
      redraw()
      void runExecute(lastMode)
    })
    item.appendChild(button)
    candidateList.appendChild(item)
  }
  dialog.hidden = false
}

function markError(error: ErrorView): void {
  showStatus(`${error.code}: ${error.message}`, true)
  const start = error.offset
  editor.focus()
  editor.setSelectionRange(start, start + Math.max(1, error.length))
}

async function runExecute(mode: 'one' | 'all'): Promise<void> {
  if (state.busy || state.remainder.length === 0) return
  lastMode = mode
  setBusy(true)
  try {
    const view = await client.execute(state.remainder, mode)
    state = applyExecuted(
      state, view.consumed, view.statements, view.goals, view.choices ?? null)
    if (view.error) {
      markError(view.error)
    } else if (!view.choices) {
      showStatus(`executed ${view.statements.length} statement(s)`)
    }
  } catch (e) {
    if (e instanceof ProtocolError && e.code === 'busy') return
    showStatus(String(e), true)
  } finally {
    setBusy(false)
    redraw()
  }
}

async function runUndo(steps: number | 'all'): Promise<void> {
  if (state.busy || state.lockedStatements.length === 0) return
  setBusy(true)
  try {
    const view = await client.undo(steps)
    for (let i = 0; i < view.steps; i++) {
      expandedTraces.delete(state.lockedStatements.length - 1 - i)
    }
    state = applyUndo(state, view.steps, view.goals)
    showStatus(`undid ${view.steps} statement(s)`)
  } catch (e) {
    showStatus(String(e), true)
  } finally {
    setBusy(false)
    redraw()
  }
}

function wireEditor(): void {
  editor.addEventListener('input', (event) => {
    const inputEvent = event as InputEvent
    if (inputEvent.inputType === 'insertText' && inputEvent.data) {
      const converted = convertAtCursor(editor.value, editor.selectionStart)
      if (converted.text !== editor.value) {
        editor.value = converted.text
        editor.setSelectionRange(converted.cursor, converted.cursor)
      }
    } else if (inputEvent.inputType === 'insertFromPaste') {
      editor.value = convertAll(editor.value)
    }
    state = applyEdit(state, editor.value)
    dialog.hidden = true
  })
}

function wireTraceToggle(): void {
  locked.addEventListener('click', (event) => {
    const target = event.target as HTMLElement
    if (!target.classList.contains('trace-toggle')) return
    const trace = target.closest('[data-trace]') as HTMLElement | null
    const stmt = target.closest('[data-stmt]') as HTMLElement | null
    if (!trace || !stmt) return
    const stmtIndex = Number(stmt.dataset['stmt'])
    const traceIndex = Number(trace.dataset['trace'])
    const set = expandedTraces.get(stmtIndex) ?? new Set<number>()
    if (set.has(traceIndex)) set.delete(traceIndex)
    else set.add(traceIndex)
    expandedTraces.set(stmtIndex, set)
    redraw()
  })
}

async function doLogin(): Promise<void> {
  const user = el<HTMLInputElement>('user').value
  const password = el<HTMLInputElement>('password').value
  try {
    try {
      await client.register(user, password)
    } catch (e) {
      if (!(e instanceof ProtocolError && e.code === 'taken')) throw e
    }
    await client.login(user, password)
    await client.newSession()
    el<HTMLDivElement>('login-panel').hidden = true
    el<HTMLDivElement>('workbench').hidden = false
    showStatus(`session ${client.session} for ${user}`)
  } catch (e) {
    showStatus(String(e), true)
  }
}

export function boot(): void {
  wireEditor()
  wireTraceToggle()
  el<HTMLButtonElement>('login').addEventListener('click', () => {
    void doLogin()
  })
  el<HTMLButtonElement>('step').addEventListener('click', () => {
    void runExecute('one')
  })
  el<HTMLButtonElement>('run').addEventListener('click', () => {
    void runExecute('all')
  })
  el<HTMLButtonElement>('undo-one').addEventListener('click', () => {
    void runUndo(1)
  })
  el<HTMLButtonElement>('undo-all').addEventListener('click', () => {
    void runUndo('all')
  })
  redraw()
}

// locked text sanity check surfaced during development builds
export function lockedLawHolds(): boolean {
  return lockedText(state) === state.lockedStatements.join('')
}

if (typeof document !== 'undefined' && document.getElementById('editor')) {
  boot()
}
