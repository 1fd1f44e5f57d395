import { describe, expect, it } from 'vitest'
import { countTraces, renderStatement, sanitizeHtml } from '../src/render'

describe('trace spans', () => {
  const TRACED = 'auto<T> using lib://prover/logic#and_comm depth 2</T>.\n'

  it('render collapsed by default', () => {
    const html = renderStatement(TRACED)
    expect(html).toContain('auto')
    expect(html).toContain('trace-toggle')
    expect(html).toContain('⯈')
    expect(html).not.toContain('and_comm')
  })

  it('expand on demand and show the full text', () => {
    const html = renderStatement(TRACED, new Set([0]))
    expect(html).toContain('⯆')
    expect(html).toContain(' using lib://prover/logic#and_comm depth 2')
  })

  it('toggle independently when a statement has several', () => {
    const text = 'auto<T> depth 1</T>. auto<T> depth 2</T>.'
    expect(countTraces(text)).toBe(2)
    const html = renderStatement(text, new Set([1]))
    expect(html).not.toContain('depth 1')
    expect(html).toContain('depth 2')
  })
})

describe('hyperlinks', () => {
  it('render as styled spans carrying the uri', () => {
    const html = renderStatement(
      'apply <A href="lib://prover/logic#and_comm">and_comm</A>.\n')
    expect(html).toContain(
      '<span class="link" title="lib://prover/logic#and_comm">and_comm</span>')
    // no live navigation
    expect(html).not.toContain('<a ')
  })

  it('escape html inside the link body', () => {
    const html = renderStatement('<A href="u"><x></A>')
    expect(html).toContain('&lt;x&gt;')
  })
})

describe('comment sanitizer', () => {
  it('keeps whitelisted markup', () => {
    const html = renderStatement('(* <b>x</b> and <code>y</code> *)')
    expect(html).toContain('<b>x</b>')
    expect(html).toContain('<code>y</code>')
  })

  it('strips script tags and their bodies', () => {
    const html = renderStatement('(* hi <script>alert(1)</script> there *)')
    expect(html).not.toContain('script')
    expect(html).not.toContain('alert')
    expect(html).toContain('hi')
    expect(html).toContain('there')
  })

  it('drops event-handler attributes on allowed tags', () => {
    const out = sanitizeHtml('<b onclick="x()">y</b>')
    expect(out).toBe('<b>y</b>')
  })

  it('blocks javascript urls on links and images', () => {
    expect(sanitizeHtml('<a href="javascript:x()">z</a>')).toBe('<a>z</a>')
    expect(sanitizeHtml('<img src="https://h/p.png">')).toContain(
      'src="https://h/p.png"')
  })

  it('escapes unknown tags instead of passing them through', () => {
    const out = sanitizeHtml('a <iframe src="x"></iframe> b')
    expect(out).not.toContain('<iframe')
  })

  it('handles nested comments opaquely', () => {
    const html = renderStatement('(* outer (* inner *) tail *)')
    expect(html).toContain('outer')
    expect(html).toContain('inner')
    expect(html).toContain('tail')
  })
})

describe('plain text', () => {
  it('html-escapes ordinary script text', () => {
    const html = renderStatement('theorem t : a → a.\n')
    expect(html).toContain('theorem t : a → a.')
  })

  it('escapes angle brackets that are not recognized markup', () => {
    const html = renderStatement('notation "<" 50.')
    expect(html).toContain('&lt;')
  })
})
